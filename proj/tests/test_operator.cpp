#include <doctest.h>

#include <set>

#include "spump/density.hpp"
#include "spump/operator.hpp"

using namespace spump;

TEST_SUITE("operator") {
TEST_CASE("layout dimension is levels squared times the mode product") {
    CHECK(build_layout(3, {5}).total_dim() == 45);
    CHECK(build_layout(3, {5, 3}).total_dim() == 135);
    CHECK(build_layout(4, {5, 3}).total_dim() == 240);
    CHECK(build_layout(4, {2}).total_dim() == 32);
}

TEST_CASE("layout rejects unsupported shapes") {
    CHECK_THROWS_AS(build_layout(2, {5}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(5, {5}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(3, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(3, {1}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(3, {5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(3, {5, 3, 2}), std::invalid_argument);
}

TEST_CASE("index ordering is ion1, ion2, mode3, mode4 with the last fastest") {
    const auto l = build_layout(4, {5, 3});
    CHECK(l.index(0, 0, 0, 0) == 0);
    CHECK(l.index(0, 0, 0, 1) == 1);
    CHECK(l.index(0, 0, 1, 0) == 3);
    CHECK(l.index(0, 1, 0, 0) == 15);
    CHECK(l.index(1, 0, 0, 0) == 60);
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < l.total_dim(); ++i) {
        const auto c = l.coordinates(i);
        CHECK(l.index(c.l1, c.l2, c.n3, c.n4) == i);
        seen.insert(i);
    }
    CHECK(seen.size() == l.total_dim());
}

TEST_CASE("ladder operators obey the truncated commutator") {
    const auto l = build_layout(3, {4, 3});
    for (int m : {0, 1}) {
        const auto b = mode_lowering(l, m);
        const auto c = commutator(b, b.adjoint()).dense();
        const int dim = l.mode_dims()[m];
        for (std::size_t i = 0; i < l.total_dim(); ++i) {
            const auto co = l.coordinates(i);
            const int n = m == 0 ? co.n3 : co.n4;
            const double expect = n == dim - 1 ? -(dim - 1.0) : 1.0;
            CHECK(std::abs(c(i, i) - cplx(expect)) < 1e-12);
        }
        CHECK((c - DenseMat(c.diagonal().asDiagonal())).norm() < 1e-12);
    }
}

TEST_CASE("ion operators act on one ion only") {
    const auto l = build_layout(3, {3});
    const auto up1 = embed_ion_operator(l, 1, ion_transition(l, Level::up, Level::down));
    const auto up2 = embed_ion_operator(l, 2, ion_transition(l, Level::up, Level::down));
    CHECK(up1.element(l.index(Level::up, Level::down, 2), l.index(Level::down, Level::down, 2)) == cplx(1.0));
    CHECK(up2.element(l.index(Level::down, Level::up, 1), l.index(Level::down, Level::down, 1)) == cplx(1.0));
    CHECK(commutator(up1, up2).is_zero());
    CHECK(up1.nonzeros() == 3 * 3);
    CHECK_THROWS_AS(embed_ion_operator(l, 0, ion_transition(l, Level::up, Level::down)), std::invalid_argument);
    CHECK_THROWS_AS(ion_transition(l, Level::leak, Level::down), std::invalid_argument);
}

TEST_CASE("operator arithmetic checks layouts") {
    const auto a = QuantumOperator::identity(build_layout(3, {3}));
    const auto b = QuantumOperator::identity(build_layout(3, {4}));
    CHECK_THROWS(a + b);
    CHECK(((a + a) * cplx(0.5) - a).is_zero());
    CHECK(a.is_hermitian());
}

TEST_CASE("density states satisfy their invariants") {
    const auto l = build_layout(3, {4, 2});
    const Eigen::VectorXcd s = singlet_ket(3);
    const auto rho = DensityState::product(l, s * s.adjoint(), thermal_mode_state(4, 0.3));
    CHECK(rho.is_valid());
    CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
    CHECK((rho.spin_reduced() - s * s.adjoint()).norm() < 1e-12);
    CHECK(rho.mean_occupation(1) == doctest::Approx(0.0));
    const Eigen::MatrixXcd th = thermal_mode_state(4, 0.3);
    double nbar = 0;
    for (int n = 0; n < 4; ++n) nbar += n * th(n, n).real();
    CHECK(rho.mean_occupation(0) == doctest::Approx(nbar).epsilon(1e-12));
    CHECK(singlet_ket(4).norm() == doctest::Approx(1.0));
    CHECK(std::abs(singlet_ket(3).dot(triplet_ket(3))) < 1e-15);
    CHECK((dark_ket(3, 0.0) - singlet_ket(3)).norm() < 1e-15);
}

TEST_CASE("thermal state has geometric populations") {
    const auto th = thermal_mode_state(30, 0.11);
    double nbar = 0, tr = 0;
    for (int n = 0; n < 30; ++n) {
        nbar += n * th(n, n).real();
        tr += th(n, n).real();
    }
    CHECK(tr == doctest::Approx(1.0));
    CHECK(nbar == doctest::Approx(0.11).epsilon(1e-9));
    CHECK(th(1, 1).real() / th(0, 0).real() == doctest::Approx(0.11 / 1.11));
}
}

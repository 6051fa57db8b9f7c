#include <doctest.h>

#include "spump/checks.hpp"
#include "spump/config.hpp"
#include "spump/model.hpp"

using namespace spump;

namespace {

SchemeParams fig2() { return preset_config("continuous_fig2").experiment.params; }

SchemeParams without_leak(SchemeParams p) {
    for (auto& [key, rate] : p.spontaneous)
        if (key.second == Level::leak) rate = 0.0;
    return p;
}

DensityState start(const HilbertLayout& l, Level a, Level b) {
    const Eigen::VectorXcd k = spin_ket(l.ion_levels(), a, b);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(l.mode_dims()[0], l.mode_dims()[0]);
    g(0, 0) = 1.0;
    return DensityState::product(l, k * k.adjoint(), g);
}

std::vector<double> grid(double t1, int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(t1 * i / n);
    return t;
}

}  // namespace

TEST_SUITE("dynamics") {
TEST_CASE("adaptive integration matches the exact unitary of a closed system") {
    const SchemeParams p = fig2();
    const auto l = build_layout(3, {4});
    const auto h = build_coherent_hamiltonian(p, l);
    const LindbladGenerator gen(l, h, {}, {});
    const auto rho0 = start(l, Level::down, Level::up);
    for (double t : {13e-6, 250e-6}) {
        const auto exact = propagate_unitary(rho0, h, t);
        const auto num = evolve_state(rho0, gen, 0.0, t, 1e-10);
        CHECK((exact.entries() - num.entries()).norm() < 1e-7);
    }
    CHECK_THROWS_AS(propagate_unitary(rho0, QuantumOperator(l, SparseMat(cplx(0, 1) * h.entries())), 1e-6),
                    std::invalid_argument);
}

TEST_CASE("derivative agrees with the explicit superoperator") {
    SchemeParams p = fig2();
    const auto l = build_layout(3, {3, 2});
    const auto gen = assemble_generator(without_leak(p), l, Channels::all());
    DenseMat m = DenseMat::Random(27 * 2, 27 * 2);
    DenseMat r = m * m.adjoint();
    r /= r.trace();
    const DensityState rho(l, r);
    const double t = 3.7e-6;
    const auto d = gen.derivative(t, rho);
    const auto s = gen.superoperator(t);
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size());
    const Eigen::VectorXcd sv = s * v;
    const Eigen::VectorXcd dv = Eigen::Map<const Eigen::VectorXcd>(d.entries().data(), d.entries().size());
    CHECK((sv - dv).norm() <= 1e-10 * std::max(1.0, dv.norm()));
}

TEST_CASE("trajectories conserve trace and positivity") {
    const SchemeParams p = fig2();
    for (const char* ch : {"all", "all,-mode4"}) {
        CAPTURE(ch);
        const Channels c = Channels::parse(ch);
        const auto l = model_layout(p, c, 4, 2);
        const auto gen = assemble_generator(p, l, c);
        const auto traj = evolve(start(l, Level::down, Level::down), gen, 0.0, 400e-6, grid(400e-6, 40));
        CHECK(traj.max_trace_drift < 1e-9);
        CHECK(traj.min_eigenvalue >= -1e-8);
        for (const auto& rec : traj.records) CHECK(std::abs(rec.pop.sum() - 1.0) < 1e-8);
        CHECK(traj.records.back().pop.p_leak > 0.0);
    }
}

TEST_CASE("absorbing leak reproduces the explicit leak level") {
    SchemeParams p = fig2();
    p.spontaneous = uniform_gamma_table(p.omega_s, 2e-3, 5e-3);
    const Channels c = Channels::parse("all,-mode4");
    const auto la = model_layout(p, c, 4, 3, false);
    const auto lx = model_layout(p, c, 4, 3, true);
    REQUIRE(la.ion_levels() == 3);
    REQUIRE(lx.ion_levels() == 4);
    const auto ta = evolve(start(la, Level::down, Level::down), assemble_generator(p, la, c), 0.0, 500e-6,
                           grid(500e-6, 10), {.tol = 1e-10});
    const auto tx = evolve(start(lx, Level::down, Level::down), assemble_generator(p, lx, c), 0.0, 500e-6,
                           grid(500e-6, 10), {.tol = 1e-10});
    for (std::size_t i = 0; i < ta.records.size(); ++i) {
        const auto& a = ta.records[i].pop;
        const auto& x = tx.records[i].pop;
        CHECK(a.p_s == doctest::Approx(x.p_s).epsilon(1e-7));
        CHECK(a.p_uu == doctest::Approx(x.p_uu).epsilon(1e-7));
        CHECK(a.p_leak == doctest::Approx(x.p_leak).epsilon(1e-7));
    }
    CHECK(ta.records.back().pop.p_leak > 1e-3);
}

TEST_CASE("null space steady state matches long-time evolution and ignores the initial spin") {
    SchemeParams p = without_leak(fig2());
    const Channels c = Channels::parse("all,-mode4");
    const auto l = model_layout(p, c, 3, 2);
    const auto gen = assemble_generator(p, l, c);
    const auto ss = liouvillian_nullspace(gen);
    CHECK(ss.is_valid(1e-10, 1e-9, -1e-10));
    CHECK(gen.derivative(0.0, ss).entries().norm() < 1e-8 * p.omega_s);
    const double target = spin_populations(ss).p_s;
    CHECK(target > 0.5);
    for (auto [a, b] : {std::pair{Level::down, Level::down}, std::pair{Level::up, Level::up},
                        std::pair{Level::up, Level::down}, std::pair{Level::aux, Level::down}}) {
        const auto fin = evolve_state(start(l, a, b), gen, 0.0, 60e-3, 1e-8);
        CHECK(std::abs(spin_populations(fin).p_s - target) < 1e-3);
    }
}

TEST_CASE("null space refuses degenerate, time-dependent and leaky generators") {
    SchemeParams p = fig2();
    const auto l3 = build_layout(3, {3});
    const LindbladGenerator closed(l3, build_coherent_hamiltonian(p, l3), {}, {});
    CHECK_THROWS_AS(liouvillian_nullspace(closed), DegenerateNullSpace);
    const auto l4 = model_layout(p, Channels::all(), 3, 2);
    CHECK_THROWS_AS(liouvillian_nullspace(assemble_generator(p, l4, Channels::all())), std::invalid_argument);
    const auto lk = model_layout(p, Channels::parse("all,-mode4"), 3, 2);
    CHECK_THROWS_AS(liouvillian_nullspace(assemble_generator(p, lk, Channels::parse("all,-mode4"))),
                    std::invalid_argument);
}

TEST_CASE("integrator reports the step limit as a numerical error") {
    const SchemeParams p = fig2();
    const auto l = build_layout(3, {3});
    const LindbladGenerator gen(l, build_coherent_hamiltonian(p, l), {}, {});
    Dopri5 integ(gen, {.rtol = 1e-8, .atol = 1e-8, .max_steps = 5});
    auto y = flatten(start(l, Level::down, Level::down));
    try {
        integ.integrate(y, 0.0, 1e-3, {}, nullptr);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.kind == NumericalError::Kind::step_limit);
        CHECK(e.time > 0.0);
    }
}

TEST_CASE("window average is a trapezoid over the window") {
    std::vector<PopulationRecord> s;
    for (int i = 0; i <= 10; ++i) {
        PopulationRecord r;
        r.time = i;
        r.pop.p_s = 2.0 * i;
        s.push_back(r);
    }
    CHECK(window_average(s, 2.0, 6.0).pop.p_s == doctest::Approx(8.0));
    CHECK(window_average(s, 0.0, 10.0).pop.p_s == doctest::Approx(10.0));
    CHECK(window_average(s, 3.0, 3.0).pop.p_s == doctest::Approx(6.0));
}

TEST_CASE("state embedding pads larger truncations") {
    const auto small = build_layout(3, {3});
    const auto big = build_layout(4, {6, 2});
    const Eigen::VectorXcd s = singlet_ket(3);
    const auto rho = DensityState::product(small, s * s.adjoint(), thermal_mode_state(3, 0.2));
    const auto e = embed_state(rho, big);
    CHECK(e.is_valid());
    CHECK(spin_populations(e).p_s == doctest::Approx(1.0));
    CHECK(e.mean_occupation(0) == doctest::Approx(rho.mean_occupation(0)));
    CHECK_THROWS_AS(embed_state(e, small), std::invalid_argument);
}
}

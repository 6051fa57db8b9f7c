#include <doctest.h>

#include <random>

#include "spump/measurement.hpp"
#include "spump/params.hpp"

using namespace spump;

namespace {

// Random density matrix supported on {down, up}^2, embedded in d^2.
Eigen::MatrixXcd random_qubit_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::MatrixXcd g(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = {n(rng), n(rng)};
    Eigen::MatrixXcd r4 = g * g.adjoint();
    r4 /= r4.trace();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);
    auto idx = [d](int q) { return (q / 2) * d + (q % 2); };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(idx(i), idx(j)) = r4(i, j);
    return out;
}

Eigen::MatrixXcd random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::MatrixXcd g(d * d, d * d);
    for (int i = 0; i < d * d; ++i)
        for (int j = 0; j < d * d; ++j) g(i, j) = {n(rng), n(rng)};
    Eigen::MatrixXcd r = g * g.adjoint();
    return r / r.trace();
}

}  // namespace

TEST_SUITE("measurement") {
TEST_CASE("populations of named states") {
    const Eigen::VectorXcd s = singlet_ket(3), t = triplet_ket(3);
    auto pop = spin_populations(Eigen::MatrixXcd(s * s.adjoint()), 3);
    CHECK(pop.p_s == doctest::Approx(1.0));
    CHECK(pop.sum() == doctest::Approx(1.0));
    pop = spin_populations(Eigen::MatrixXcd(t * t.adjoint()), 3);
    CHECK(pop.p_t == doctest::Approx(1.0));
    const Eigen::VectorXcd a = spin_ket(4, Level::aux, Level::leak);
    pop = spin_populations(Eigen::MatrixXcd(a * a.adjoint()), 4);
    CHECK(pop.p_leak == doctest::Approx(1.0));
    CHECK(pop.p_a == doctest::Approx(0.0));
    const Eigen::VectorXcd b = spin_ket(3, Level::aux, Level::up);
    pop = spin_populations(Eigen::MatrixXcd(0.5 * b * b.adjoint()), 3, 0.5);
    CHECK(pop.p_a == doctest::Approx(0.5));
    CHECK(pop.p_leak == doctest::Approx(0.5));
}

TEST_CASE("reconstruction equals direct populations on random qubit-manifold states") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    int flagged = 0;
    for (int k = 0; k < 1000; ++k) {
        const int d = k % 2 ? 3 : 4;
        const Eigen::MatrixXcd rho = random_qubit_state(d, rng);
        const auto direct = spin_populations(rho, d);
        const auto none = simulate_detection(rho, d, ReadoutPulse::none);
        const auto pi = simulate_detection(rho, d, ReadoutPulse::pi);
        const auto ph = simulate_detection(rho, d, ReadoutPulse::pi_half_phase_averaged);
        const auto rec = reconstruct_populations(none, pi, ph);
        worst = std::max({worst, std::abs(rec.p_s - direct.p_s), std::abs(rec.p_t - direct.p_t),
                          std::abs(rec.p_uu - direct.p_uu), std::abs(rec.p_dd - direct.p_dd)});
        flagged += rec.flagged;
        CHECK(std::abs(outside_manifold_probability(none, pi)) < 1e-12);
    }
    CHECK(worst < 1e-9);
    CHECK(flagged == 0);
}

TEST_CASE("phase-averaged pi/2 readout equals a 64-phase brute force") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 50; ++k) {
        const int d = k % 2 ? 3 : 4;
        const Eigen::MatrixXcd rho = random_state(d, rng);
        const double leaked = 0.01 * k / 50.0;
        const Eigen::MatrixXcd r = rho * (1.0 - leaked);
        const auto avg = simulate_detection(r, d, ReadoutPulse::pi_half_phase_averaged, leaked);
        DetectionResult brute;
        for (int j = 0; j < 64; ++j) {
            const auto at = detection_at_phase(r, d, kTwoPi * j / 64.0, leaked);
            brute.p2 += at.p2 / 64.0;
            brute.p1 += at.p1 / 64.0;
            brute.p0 += at.p0 / 64.0;
        }
        CHECK(std::abs(avg.p2 - brute.p2) < 1e-10);
        CHECK(std::abs(avg.p1 - brute.p1) < 1e-10);
        CHECK(std::abs(avg.p0 - brute.p0) < 1e-10);
        CHECK(avg.p2 + avg.p1 + avg.p0 == doctest::Approx(1.0));
    }
}

TEST_CASE("pi/2 rotation is unitary and acts only on the qubit") {
    for (int d : {3, 4}) {
        const auto u = half_pi_rotation(d, 0.3);
        CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-14);
        CHECK(std::abs(u(2, 2) - cplx(1.0)) < 1e-15);
        CHECK(std::norm(u(0, 1)) == doctest::Approx(0.5));
    }
}

TEST_CASE("population outside the qubit manifold is visible and flagged") {
    const Eigen::VectorXcd aa = spin_ket(3, Level::aux, Level::aux);
    const Eigen::VectorXcd s = singlet_ket(3);
    const Eigen::MatrixXcd rho = 0.9 * s * s.adjoint() + 0.1 * aa * aa.adjoint();
    const auto none = simulate_detection(rho, 3, ReadoutPulse::none);
    const auto pi = simulate_detection(rho, 3, ReadoutPulse::pi);
    const auto ph = simulate_detection(rho, 3, ReadoutPulse::pi_half_phase_averaged);
    CHECK(outside_manifold_probability(none, pi) == doctest::Approx(0.2));
    CHECK(reconstruct_populations(none, pi, ph).flagged);
    const auto leak_only = simulate_detection(Eigen::MatrixXcd(0.8 * s * s.adjoint()), 3, ReadoutPulse::none, 0.2);
    CHECK(leak_only.p0 == doctest::Approx(0.2));
    CHECK(leak_only.p1 == doctest::Approx(0.8));
}
}

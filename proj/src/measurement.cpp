#include "spump/measurement.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace spump {
namespace {

constexpr int kDown = static_cast<int>(Level::down);
constexpr int kUp = static_cast<int>(Level::up);
constexpr int kAux = static_cast<int>(Level::aux);
constexpr int kLeak = static_cast<int>(Level::leak);

DetectionResult count_bright(const Eigen::MatrixXcd& spin, int d, double leaked, ReadoutPulse pulse) {
    DetectionResult r;
    r.pulse = pulse;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double p = spin(a * d + b, a * d + b).real();
            const int bright = (a == kDown) + (b == kDown);
            (bright == 2 ? r.p2 : bright == 1 ? r.p1 : r.p0) += p;
        }
    r.p0 += leaked;
    return r;
}

/// Both-ion pi pulse: down <-> up on each ion (global phase irrelevant).
Eigen::MatrixXcd pi_rotation(int d) {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(d, d);
    r(kDown, kDown) = r(kUp, kUp) = 0.0;
    r(kDown, kUp) = r(kUp, kDown) = cplx(0.0, -1.0);
    return r;
}

}  // namespace

SpinPopulations spin_populations(const Eigen::MatrixXcd& spin, int d, double leaked) {
    SpinPopulations p;
    const int ud = kUp * d + kDown, du = kDown * d + kUp;
    const double diag_sum = spin(ud, ud).real() + spin(du, du).real();
    const double coh = spin(ud, du).real();
    p.p_s = 0.5 * diag_sum - coh;
    p.p_t = 0.5 * diag_sum + coh;
    p.p_uu = spin(kUp * d + kUp, kUp * d + kUp).real();
    p.p_dd = spin(kDown * d + kDown, kDown * d + kDown).real();
    p.p_leak = leaked;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double v = spin(a * d + b, a * d + b).real();
            if (a == kLeak || b == kLeak) p.p_leak += v;
            else if (a == kAux || b == kAux) p.p_a += v;
        }
    return p;
}

SpinPopulations spin_populations(const DensityState& rho) {
    return spin_populations(rho.spin_reduced(), rho.layout().ion_levels(), rho.leaked());
}

PopulationRecord make_record(double time, const DensityState& rho) {
    return {time, spin_populations(rho), rho.mean_occupation(0)};
}

const char* readout_name(ReadoutPulse p) {
    switch (p) {
        case ReadoutPulse::none: return "none";
        case ReadoutPulse::pi: return "pi";
        case ReadoutPulse::pi_half_phase_averaged: return "pi_half";
    }
    return "?";
}

Eigen::MatrixXcd half_pi_rotation(int d, double phase) {
    // exp(-i pi/4 (cos p X + sin p Y)) with X, Y on span{down, up}
    const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(d, d);
    r(kDown, kDown) = r(kUp, kUp) = c;
    r(kUp, kDown) = cplx(0.0, -s) * std::polar(1.0, phase);
    r(kDown, kUp) = cplx(0.0, -s) * std::polar(1.0, -phase);
    return r;
}

DetectionResult detection_at_phase(const Eigen::MatrixXcd& spin, int d, double phase, double leaked) {
    const Eigen::MatrixXcd r = half_pi_rotation(d, phase);
    const Eigen::MatrixXcd u = Eigen::kroneckerProduct(r, r);
    DetectionResult out = count_bright(u * spin * u.adjoint(), d, leaked, ReadoutPulse::pi_half_phase_averaged);
    return out;
}

DetectionResult simulate_detection(const Eigen::MatrixXcd& spin, int d, ReadoutPulse pulse, double leaked) {
    switch (pulse) {
        case ReadoutPulse::none: return count_bright(spin, d, leaked, pulse);
        case ReadoutPulse::pi: {
            const Eigen::MatrixXcd r = pi_rotation(d);
            const Eigen::MatrixXcd u = Eigen::kroneckerProduct(r, r);
            return count_bright(u * spin * u.adjoint(), d, leaked, pulse);
        }
        case ReadoutPulse::pi_half_phase_averaged: {
            // R(p) = R0 + e^{ip} Rp + e^{-ip} Rm, so R(p) (x) R(p) = sum_m U_m e^{imp}
            // and the uniform phase average of U rho U^+ is sum_m U_m rho U_m^+.
            const Eigen::MatrixXcd r0 = half_pi_rotation(d, 0.0);
            Eigen::MatrixXcd rp = Eigen::MatrixXcd::Zero(d, d), rm = Eigen::MatrixXcd::Zero(d, d), rc = r0;
            rp(kUp, kDown) = r0(kUp, kDown);
            rm(kDown, kUp) = r0(kDown, kUp);
            rc(kUp, kDown) = rc(kDown, kUp) = 0.0;
            const std::array<Eigen::MatrixXcd, 3> parts{rm, rc, rp};  // harmonic -1, 0, +1
            std::array<Eigen::MatrixXcd, 5> harm;
            for (auto& h : harm) h = Eigen::MatrixXcd::Zero(d * d, d * d);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) harm[i + j] += Eigen::kroneckerProduct(parts[i], parts[j]);
            Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d * d, d * d);
            for (const auto& u : harm) avg += u * spin * u.adjoint();
            return count_bright(avg, d, leaked, pulse);
        }
    }
    return {};
}

DetectionResult simulate_detection(const DensityState& rho, ReadoutPulse pulse) {
    return simulate_detection(rho.spin_reduced(), rho.layout().ion_levels(), pulse, rho.leaked());
}

Reconstruction reconstruct_populations(const DetectionResult& none, const DetectionResult& pi,
                                       const DetectionResult& pi_half, double aa_threshold) {
    Reconstruction r;
    r.coherence_re = -0.5 + 2.0 * pi_half.p0 + 0.5 * (none.p2 - none.p0) + 0.5 * (pi.p2 - pi.p0);
    const double diag_sum = none.p1 - (pi.p0 - none.p2);
    r.p_s = 0.5 * diag_sum - r.coherence_re;
    r.p_t = 0.5 * diag_sum + r.coherence_re;
    r.p_uu = pi.p2;
    r.p_dd = none.p2;
    const double eps = 1e-9;
    auto bad = [eps](double v) { return v < -eps || v > 1.0 + eps; };
    r.flagged = bad(r.p_s) || bad(r.p_t) || bad(r.p_uu) || bad(r.p_dd) ||
                0.5 * outside_manifold_probability(none, pi) > aa_threshold;
    return r;
}

double outside_manifold_probability(const DetectionResult& none, const DetectionResult& pi) {
    return none.p0 + pi.p0 - (none.p2 + pi.p2);
}

}  // namespace spump

#pragma once

#include <Eigen/Dense>

#include "spump/density.hpp"

namespace spump {

/// Spin-pair populations. p_a is the probability of at least one ion in |a>
/// and none in x; p_leak of at least one ion in x (including probability
/// removed by absorbing loss channels).
struct SpinPopulations {
    double p_s = 0, p_t = 0, p_uu = 0, p_dd = 0, p_a = 0, p_leak = 0;
    double sum() const { return p_s + p_t + p_uu + p_dd + p_a + p_leak; }
};

struct PopulationRecord {
    double time = 0;  // seconds, or step index in stepwise series
    SpinPopulations pop;
    double nbar3 = 0;  // mean mode-3 occupation of the stored state
};

SpinPopulations spin_populations(const DensityState& rho);
/// Same on a reduced spin density matrix (ion_levels^2 square).
SpinPopulations spin_populations(const Eigen::MatrixXcd& spin, int ion_levels, double leaked = 0.0);

PopulationRecord make_record(double time, const DensityState& rho);

enum class ReadoutPulse { none, pi, pi_half_phase_averaged };
const char* readout_name(ReadoutPulse p);

/// Probabilities of two, one and zero ions found in |down> (bright).
struct DetectionResult {
    double p2 = 0, p1 = 0, p0 = 0;
    ReadoutPulse pulse = ReadoutPulse::none;
};

/// Ideal instantaneous analysis pulses on down <-> up of both ions, identity
/// on a and x. Probability held by absorbing leak channels is dark.
DetectionResult simulate_detection(const DensityState& rho, ReadoutPulse pulse);
DetectionResult simulate_detection(const Eigen::MatrixXcd& spin, int ion_levels, ReadoutPulse pulse,
                                   double leaked = 0.0);

/// pi/2 readout at one fixed microwave phase.
DetectionResult detection_at_phase(const Eigen::MatrixXcd& spin, int ion_levels, double phase, double leaked = 0.0);

/// Single-ion pi/2 rotation about cos(phase) X + sin(phase) Y on down/up,
/// identity elsewhere.
Eigen::MatrixXcd half_pi_rotation(int ion_levels, double phase);

struct Reconstruction {
    double p_s = 0, p_t = 0, p_uu = 0, p_dd = 0;
    double coherence_re = 0;  // Re rho_{ud,du}
    /// Bound on P_aa = outside/2 exceeded the threshold, or a population is
    /// out of [0, 1]: the |aa>-negligible assumption may not hold.
    bool flagged = false;
};

Reconstruction reconstruct_populations(const DetectionResult& none, const DetectionResult& pi,
                                       const DetectionResult& pi_half, double aa_threshold = 1e-2);

/// P0 + P0,pi - (P2 + P2,pi)
double outside_manifold_probability(const DetectionResult& none, const DetectionResult& pi);

}  // namespace spump

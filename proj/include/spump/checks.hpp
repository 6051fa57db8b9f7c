#pragma once

#include <string>
#include <vector>

#include "spump/protocol.hpp"

namespace spump {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;  // measured quantity
    double limit = 0.0;  // bound it was compared against
    std::string detail;
};

/// Invariant suite on the configured model: Hermitian Hamiltonians,
/// conserved trace + leaked probability, dark state of the sideband drive,
/// and a short evolution with trace and positivity monitoring.
std::vector<CheckResult> validate_model(const Experiment& x, double probe_time = 200e-6);

struct ConvergenceRow {
    std::string name;
    int mode3_dim = 0, mode4_dim = 0;
    double tol = 0.0;
    double p_s = 0.0;
    double delta = 0.0;  // against the reference row
    double limit = 0.0;
    bool passed = true;
};

/// Continuous protocol: each variant starts from the steady state of its own
/// truncation with mode 4 and leakage removed (Liouvillian null space), then
/// evolves under the full model for `settle` and averages P_S over the last
/// `window`. Stepwise protocol: the full schedule at r = r_mean. The ensemble
/// is not averaged; truncation and tolerance errors do not depend on r.
struct ConvergenceSpec {
    double settle = 2e-3;
    double window = 0.5e-3;
    double truncation_limit = 1e-3;
    double tolerance_limit = 1e-4;
};

/// Rows: reference, doubled truncations, halved tolerance.
std::vector<ConvergenceRow> convergence_study(const Experiment& x, const ConvergenceSpec& spec = {});

/// Copy of rho into a layout with larger mode truncations (zero padding); a
/// missing mode 4 in rho is taken as vacuum.
DensityState embed_state(const DensityState& rho, const HilbertLayout& target);

}  // namespace spump

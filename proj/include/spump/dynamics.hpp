#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spump/density.hpp"
#include "spump/generator.hpp"
#include "spump/measurement.hpp"

namespace spump {

/// Integration failure; `time` is where it happened.
struct NumericalError : std::runtime_error {
    enum class Kind { step_underflow, non_finite, step_limit, positivity, trace_drift };
    NumericalError(Kind k, double t, const std::string& what);
    Kind kind;
    double time;
};

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-8;
    double h_max = 0.0;  // 0: span length
    std::size_t max_steps = 100'000'000;
};

struct IntegratorStats {
    std::size_t accepted = 0, rejected = 0, rhs_evals = 0;
    IntegratorStats& operator+=(const IntegratorStats& o) {
        accepted += o.accepted;
        rejected += o.rejected;
        rhs_evals += o.rhs_evals;
        return *this;
    }
};

/// Dormand-Prince 5(4) with PI step control and 4th-order dense output on the
/// flat generator state (row-major rho followed by the leaked slot).
class Dopri5 {
public:
    using Observer = std::function<void(double t, const cplx* y)>;

    Dopri5(const LindbladGenerator& gen, IntegratorOptions opt = {});

    /// Advances y from t0 to t1; the observer is called at every sample time
    /// (sorted, inside [t0, t1]) with interpolated states.
    void integrate(std::vector<cplx>& y, double t0, double t1, const std::vector<double>& samples = {},
                   const Observer& observe = {});

    const IntegratorStats& stats() const { return stats_; }
    /// Last accepted step size, reused as the next initial guess.
    double last_step() const { return h_last_; }

private:
    double initial_step(const std::vector<cplx>& y, double t0, double span);
    void rhs(double t, const cplx* y, cplx* dy);

    const LindbladGenerator& gen_;
    IntegratorOptions opt_;
    IntegratorStats stats_;
    double h_last_ = 0.0;
    std::size_t n_;
    std::vector<cplx> k_[7], ytmp_, ynew_, err_, rc_[5];
};

std::vector<cplx> flatten(const DensityState& rho);
DensityState unflatten(const HilbertLayout& layout, const std::vector<cplx>& y);

enum class StorageMode { populations, states };

struct EvolveOptions {
    double tol = 1e-8;  // relative tolerance, [1e-12, 1e-4]
    StorageMode storage = StorageMode::populations;
    std::size_t checkpoint_every = 100;  // full-state checkpoints in populations mode
    bool check_spectrum = true;          // min eigenvalue at checkpoints and the end
    double trace_limit = 1e-9;
    double eig_limit = -1e-8;
    std::size_t max_steps = 0;  // 0: unlimited
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PopulationRecord> records;
    std::vector<DensityState> states;   // every sample (states mode) or checkpoints
    std::vector<std::size_t> state_index;  // sample index of each stored state
    DensityState final_state;
    IntegratorStats stats;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;  // over inspected states
};

/// Adaptive integration of the master equation from t0 to t1 with samples
/// at `sample_times`. Trace drift and positivity beyond the limits abort
/// with NumericalError.
Trajectory evolve(const DensityState& rho0, const LindbladGenerator& gen, double t0, double t1,
                  const std::vector<double>& sample_times, const EvolveOptions& opt = {});

/// Final state only.
DensityState evolve_state(const DensityState& rho0, const LindbladGenerator& gen, double t0, double t1,
                          double tol = 1e-8, IntegratorStats* stats = nullptr, std::size_t max_steps = 0);

/// exp(-i H t) for a Hermitian, time-independent H (dense).
Eigen::MatrixXcd unitary_propagator(const QuantumOperator& h, double duration);

/// rho -> U rho U^+; throws std::invalid_argument for a non-Hermitian H.
DensityState propagate_unitary(const DensityState& rho, const QuantumOperator& h, double duration);
DensityState apply_unitary(const DensityState& rho, const Eigen::MatrixXcd& u);

/// Trapezoidal time average of the records inside [ta, tb]. A window of zero
/// length returns the sample nearest to it.
PopulationRecord steady_by_window(const Trajectory& traj, double ta, double tb);
PopulationRecord window_average(const std::vector<PopulationRecord>& series, double ta, double tb);

/// Degenerate (or missing) null space of the Liouvillian.
struct DegenerateNullSpace : std::runtime_error {
    DegenerateNullSpace(std::size_t multiplicity, const std::string& what);
    std::size_t multiplicity;
};

/// Normalized Hermitian steady state of a time-independent generator.
DensityState liouvillian_nullspace(const LindbladGenerator& gen);

}  // namespace spump

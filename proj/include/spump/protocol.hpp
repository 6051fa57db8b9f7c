#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spump/dynamics.hpp"
#include "spump/measurement.hpp"
#include "spump/params.hpp"

namespace spump {

using Series = std::vector<PopulationRecord>;

struct ContinuousSchedule {
    double duration = 12e-3;
    double sample_every = 50e-6;       // used when sample_times is empty
    std::vector<double> sample_times;  // explicit sample times, inside [0, duration]
    Channels channels;
    double window_start = 6e-3, window_end = 12e-3;

    std::vector<double> resolved_samples() const;
};

enum class CoolingMode { lindblad, thermal_reset };
const char* cooling_mode_name(CoolingMode m);

struct StepwiseSchedule {
    int n_steps = 60;
    double t_cool = 100e-6;
    double t_coh = 0.0;  // 0: one full period 2 pi / sqrt(Omega_s^2 + Omega_c^2)
    double t_repump = 6e-6;
    CoolingMode cooling_mode = CoolingMode::thermal_reset;
    Channels channels;
    int window_first = 35, window_last = 59;
};

struct EnsembleSpec {
    double r_mean = 0.0;
    double r_rms = 0.014;
    int nodes = 7;
};

struct NumericsSpec {
    int mode3_dim = 5;
    int mode4_dim = 3;
    double tol = 1e-8;
    bool explicit_leak = false;  // store the x level instead of absorbing it
    int threads = 0;             // 0: hardware concurrency
    std::size_t max_steps = 0;   // per integration segment; 0: unlimited
};

/// Initial spin pair; the motion starts in the ground state.
struct InitialSpin {
    Level ion1 = Level::down;
    Level ion2 = Level::down;
};

double compute_t2pi(const SchemeParams& p);

Series run_continuous(const SchemeParams& p, const ContinuousSchedule& s, const NumericsSpec& num = {},
                      InitialSpin init = {});

/// One record per step (index 0 is the initial state), taken after the
/// repump segment. Each step: cooling, coherent pulse, repump. Scattering
/// acts during the coherent pulse and the repump segment.
Series run_stepwise(const SchemeParams& p, const StepwiseSchedule& s, const NumericsSpec& num = {},
                    InitialSpin init = {});

/// Quadrature-weighted average of runner(r) over r ~ N(r_mean, r_rms^2).
/// With mirror_symmetric (P(r) == P(2 r_mean - r)) only one node of each
/// symmetric pair is evaluated. Nodes run in parallel; the result does not
/// depend on completion order.
Series gaussian_average(const std::function<Series(double r)>& runner, const EnsembleSpec& e,
                        bool mirror_symmetric = false, int threads = 0);

enum class ProtocolKind { continuous, stepwise };
const char* protocol_name(ProtocolKind k);

struct Experiment {
    ProtocolKind kind = ProtocolKind::continuous;
    SchemeParams params;
    ContinuousSchedule continuous;
    StepwiseSchedule stepwise;
    EnsembleSpec ensemble;
    NumericsSpec numerics;
    InitialSpin initial;
};

/// Ensemble-averaged series for the configured protocol.
Series run_experiment(const Experiment& x);

/// Average over the protocol's steady-state window.
PopulationRecord steady_value(const Experiment& x, const Series& s);

/// Idealizations understood by error_budget: any channel name (switched off),
/// "r" (no imbalance), "nbar" (ground-state cooling) and "spontaneous" (no
/// scattering). Several can be combined with '+'.
struct Ablation {
    std::string name;
    Experiment apply(const Experiment& base) const;
};

struct BudgetRow {
    std::string name;
    PopulationRecord steady;
    double delta_p_s = 0.0;  // against the baseline row
};

/// First row is the baseline. Throws std::invalid_argument on an unknown
/// ablation name before running anything.
std::vector<BudgetRow> error_budget(const Experiment& base, const std::vector<std::string>& ablations);

/// Parallel map with order-deterministic results.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace spump

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spump/params.hpp"

namespace spump {

/// Preparation-rate formula.
///   weak:       4 g_da Oc^2 / g^2
///   broadened:  4 g_da Oc^2 / (g^2 + 16 Oc^2)
///   thermal:    g_da Oc^2 / ((g^2 + 4 Oc^2)(1 + nbar))      (prefactor 4 absent)
///   thermal_4x: 4 g_da Oc^2 / ((g^2 + 16 Oc^2)(1 + nbar))   (broadened times P0)
enum class RateVariant { weak, broadened, thermal, thermal_4x };
const char* variant_name(RateVariant v);
RateVariant parse_variant(const std::string& s);
const std::vector<RateVariant>& all_variants();

/// Raised when a rate formula is singular for the given parameters.
struct RegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EffectiveRates {
    double gamma_plus = 0;  // |uu> -> |S> (and the same to |T>)
    double kappa_res = 0;   // |dd> -> |T> -> |uu>
    double gamma_inh = 0;   // off-resonant |S> -> |S_a> depumping
    double Gamma_uu = 0, Gamma_T = 0, Gamma_dd = 0;  // scattering losses from |S>
    double kappa_r = 0;     // imbalance depumping
    double kappa_4 = 0;     // mode-4 depumping
    double Gamma_up_leak = 0;
    double gamma_minus_uu = 0, gamma_minus_T = 0, gamma_minus_dd = 0;

    double gamma_minus() const { return gamma_minus_uu + gamma_minus_T + gamma_minus_dd; }
    /// Composite losses rebuilt from the components.
    void recompute_composites(double gamma_up_a, double gamma_down_a);
};

/// All rates from the physical parameters. The a-level decay rates entering
/// the scattering-loss formulas are the repumper plus the scattering table.
EffectiveRates compute_effective_rates(const SchemeParams& p, RateVariant variant);

/// Parameters for rates that are linear in r^2 averaged over r ~ N(r_mean,
/// r_rms^2): r is replaced by sqrt(r_mean^2 + r_rms^2).
SchemeParams ensemble_rate_params(SchemeParams p, double r_mean, double r_rms);

struct RatePopulations {
    double p_s = 0, p_uu = 0, p_t = 0, p_dd = 0, p_leak = 0;
    double sum() const { return p_s + p_uu + p_t + p_dd + p_leak; }
};

struct RateSample {
    double time;
    RatePopulations pop;
};

/// Exact solution of the linear rate equations (matrix exponential) at the
/// requested times. With include_leak the up-state scattering into x drains
/// |uu>, |T>, |S> into p_leak.
std::vector<RateSample> integrate_rate_equations(const EffectiveRates& rates, const RatePopulations& p0,
                                                 const std::vector<double>& times, bool include_leak);

struct ClosedForm {
    double fidelity;
    double error;
};

/// F = 1/(1 + E), E = g_-/g_+ + (g_uu + 2 g_T + 3 g_dd)/k_res.
ClosedForm steady_state_closed_form(const EffectiveRates& rates);

}  // namespace spump

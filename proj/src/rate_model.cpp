#include "spump/rate_model.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace spump {

const char* variant_name(RateVariant v) {
    switch (v) {
        case RateVariant::weak: return "weak";
        case RateVariant::broadened: return "broadened";
        case RateVariant::thermal: return "thermal";
        case RateVariant::thermal_4x: return "thermal_4x";
    }
    return "?";
}

RateVariant parse_variant(const std::string& s) {
    for (RateVariant v : all_variants())
        if (s == variant_name(v)) return v;
    throw std::invalid_argument("unknown rate-model variant '" + s + "'");
}

const std::vector<RateVariant>& all_variants() {
    static const std::vector<RateVariant> v{RateVariant::weak, RateVariant::broadened, RateVariant::thermal,
                                            RateVariant::thermal_4x};
    return v;
}

void EffectiveRates::recompute_composites(double g_ua, double g_da) {
    const double g = g_ua + g_da;
    const double f_up = g > 0 ? g_ua / g : 0.0;
    const double f_down = g > 0 ? g_da / g : 0.0;
    gamma_minus_uu = gamma_inh * f_up + Gamma_uu + kappa_r + kappa_4;
    gamma_minus_T = gamma_inh * f_down / 2.0 + Gamma_T;
    gamma_minus_dd = Gamma_dd;
}

EffectiveRates compute_effective_rates(const SchemeParams& p, RateVariant variant) {
    p.validate();
    EffectiveRates r;
    const double g = p.repump_linewidth();
    const double oc2 = p.omega_c * p.omega_c;
    const double p0 = 1.0 / (1.0 + p.nbar);

    if (oc2 > 0.0) {
        if (g <= 0.0 && (variant == RateVariant::weak))
            throw RegimeError("rate model: zero repump linewidth makes the weak-drive preparation rate singular");
        switch (variant) {
            case RateVariant::weak: r.gamma_plus = 4.0 * p.gamma_down_a * oc2 / (g * g); break;
            case RateVariant::broadened: r.gamma_plus = 4.0 * p.gamma_down_a * oc2 / (g * g + 16.0 * oc2); break;
            case RateVariant::thermal: r.gamma_plus = p.gamma_down_a * oc2 / ((g * g + 4.0 * oc2)) * p0; break;
            case RateVariant::thermal_4x:
                r.gamma_plus = 4.0 * p.gamma_down_a * oc2 / (g * g + 16.0 * oc2) * p0;
                break;
        }
    }
    r.kappa_res = p.kappa / 2.0;

    if (oc2 > 0.0) {
        if (p.omega_s == 0.0) throw RegimeError("rate model: omega_s = 0 makes the inherent depumping singular");
        r.gamma_inh = (g + p.kappa) * oc2 / (4.0 * p.omega_s * p.omega_s);
    }

    // Scattering losses from |S>
    const double g_ud = p.spontaneous_rate(Level::down, Level::up);
    const double g_du = p.spontaneous_rate(Level::up, Level::down);
    const double g_ad = p.spontaneous_rate(Level::down, Level::aux);
    const double g_au = p.spontaneous_rate(Level::up, Level::aux);
    const double ua = p.gamma_up_a + p.spontaneous_rate(Level::aux, Level::up);
    const double da = p.gamma_down_a + p.spontaneous_rate(Level::aux, Level::down);
    const double s = ua + da, k2 = p.kappa / 2.0;
    const double over_s = s > 0 ? 1.0 / s : 0.0;
    const double over_sk = s + k2 > 0 ? 1.0 / (s + k2) : 0.0;
    r.Gamma_uu = g_ud + ua * g_ad * over_s + ua * g_au * over_s / 2.0 * (1.0 + k2 * over_sk);
    r.Gamma_T = da * g_ad * over_s / 2.0 + s * g_au * over_sk / 4.0 + da * g_au * over_s / 2.0 * k2 * over_sk;
    r.Gamma_dd = g_du + da * g_au * over_sk / 2.0;

    const double ros = p.r * p.omega_s;
    if (ros != 0.0 && p.nbar != 0.0) {
        if (p.kappa == 0.0) throw RegimeError("rate model: kappa = 0 with r != 0 and nbar != 0 makes kappa_r singular");
        r.kappa_r = 16.0 * ros * ros * p.nbar / (5.0 * p.kappa);
    }
    const double g4 = p.mode4_coupling();
    if (p.kappa4 != 0.0 && g4 != 0.0) {
        if (p.delta == 0.0) throw RegimeError("rate model: delta = 0 makes the mode-4 depumping singular");
        r.kappa_4 = 2.0 * p.kappa4 * g4 * g4 / (p.delta * p.delta);
    }
    r.Gamma_up_leak = p.spontaneous_rate(Level::up, Level::leak);
    r.recompute_composites(p.gamma_up_a, p.gamma_down_a);
    return r;
}

SchemeParams ensemble_rate_params(SchemeParams p, double r_mean, double r_rms) {
    p.r = std::sqrt(r_mean * r_mean + r_rms * r_rms);
    return p;
}

std::vector<RateSample> integrate_rate_equations(const EffectiveRates& r, const RatePopulations& p0,
                                                 const std::vector<double>& times, bool include_leak) {
    // order: S, uu, T, dd, leak
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
    const double gp = r.gamma_plus, kr = r.kappa_res;
    m(0, 1) += gp;
    m(0, 0) -= r.gamma_minus();
    m(1, 1) -= 2.0 * gp;
    m(1, 2) += kr;
    m(1, 0) += r.gamma_minus_uu;
    m(2, 1) += gp;
    m(2, 2) -= kr;
    m(2, 3) += kr;
    m(2, 0) += r.gamma_minus_T;
    m(3, 3) -= kr;
    m(3, 0) += r.gamma_minus_dd;
    if (include_leak) {
        const double gl = r.Gamma_up_leak;
        m(1, 1) -= 2.0 * gl;
        m(2, 2) -= gl;
        m(0, 0) -= gl;
        m(4, 1) += 2.0 * gl;
        m(4, 2) += gl;
        m(4, 0) += gl;
    }
    Eigen::Matrix<double, 5, 1> x0;
    x0 << p0.p_s, p0.p_uu, p0.p_t, p0.p_dd, p0.p_leak;
    std::vector<RateSample> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < 0) throw std::invalid_argument("rate equations: negative time");
        const Eigen::Matrix<double, 5, 5> mt = m * t;
        const Eigen::Matrix<double, 5, 1> x = mt.exp() * x0;
        out.push_back({t, {x(0), x(1), x(2), x(3), x(4)}});
    }
    return out;
}

ClosedForm steady_state_closed_form(const EffectiveRates& r) {
    if (r.gamma_plus <= 0.0 || r.kappa_res <= 0.0)
        throw RegimeError("closed form needs gamma_plus > 0 and kappa_res > 0 (no pumping)");
    const double e = r.gamma_minus() / r.gamma_plus +
                     (r.gamma_minus_uu + 2.0 * r.gamma_minus_T + 3.0 * r.gamma_minus_dd) / r.kappa_res;
    return {1.0 / (1.0 + e), e};
}

}  // namespace spump

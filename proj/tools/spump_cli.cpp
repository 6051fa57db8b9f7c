// spump: command-line front end for the singlet-pumping simulations.
//
//   spump run-continuous --preset continuous_fig2 --out results/
//   spump run-stepwise   --preset stepwise_fig3 --override "stepwise.n_steps = 40"
//   spump rate-model     --preset continuous_fig2 --variant thermal_4x
//   spump error-budget   --preset stepwise_fig3 --ablate spontaneous,r,mode4,nbar
//   spump validate       --config my.cfg
//   spump convergence    --preset continuous_fig2
//
// Exit codes: 0 success, 2 configuration or validation failure, 3 numerical
// failure (integrator, positivity, trace, failed invariant), 1 anything else.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spump/checks.hpp"
#include "spump/config.hpp"
#include "spump/kernels.hpp"
#include "spump/rate_model.hpp"

#ifndef SPUMP_VERSION
#define SPUMP_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace spump;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string out = ".";
    std::vector<std::string> overrides;
    std::string channels;
    int quadrature = 0;
    int threads = -1;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "Config file");
    app->add_option("--preset", o.preset, "Bundled preset")->check(CLI::IsMember(preset_names()));
    app->add_option("--out", o.out, "Output directory");
    app->add_option("--override", o.overrides, "key=value [unit], repeatable")->allow_extra_args(false);
    app->add_option("--channels", o.channels, "Active channels, e.g. all,-mode4");
    app->add_option("--quadrature", o.quadrature, "Gauss-Hermite nodes for the r ensemble")->check(CLI::PositiveNumber);
    app->add_option("--threads", o.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const CommonOptions& o, const std::string& fallback_preset) {
    if (!o.config.empty() && !o.preset.empty()) throw ConfigValidationError("preset", "--config and --preset are exclusive");
    RunConfig cfg = !o.config.empty() ? load_config(o.config)
                                      : preset_config(o.preset.empty() ? fallback_preset : o.preset);
    for (const auto& a : o.overrides) apply_override(cfg, a);
    if (!o.channels.empty()) {
        const Channels ch = Channels::parse(o.channels);
        cfg.experiment.continuous.channels = ch;
        cfg.experiment.stepwise.channels = ch;
    }
    if (o.quadrature > 0) cfg.experiment.ensemble.nodes = o.quadrature;
    if (o.threads >= 0) cfg.experiment.numerics.threads = o.threads;
    cfg.out_dir = o.out;
    cfg.validate();
    return cfg;
}

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / name;
}

void write_manifest(const RunConfig& cfg, const std::string& command, const std::string& stem,
                    const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    std::ofstream f(output_path(cfg, stem + ".manifest"));
    f << "command=" << command << '\n';
    f << "code_version=" << SPUMP_VERSION << '\n';
    f << "kernel_isa=" << kernels::active().name << '\n';
    f << "preset=" << cfg.preset << '\n';
    for (const auto& [k, v] : config_entries(cfg)) f << k << '=' << v << '\n';
    for (const auto& [k, v] : extra) f << k << '=' << v << '\n';
    if (!f) throw std::runtime_error("cannot write manifest in " + cfg.out_dir);
}

void write_series(const RunConfig& cfg, const std::string& stem, const Series& s) {
    std::ofstream f(output_path(cfg, stem + ".csv"));
    f << "time_or_step,P_S,P_T,P_uu,P_dd,P_a,P_leak,nbar_mode3\n";
    for (const auto& r : s)
        f << num(r.time) << ',' << num(r.pop.p_s) << ',' << num(r.pop.p_t) << ',' << num(r.pop.p_uu) << ','
          << num(r.pop.p_dd) << ',' << num(r.pop.p_a) << ',' << num(r.pop.p_leak) << ',' << num(r.nbar3) << '\n';
    if (!f) throw std::runtime_error("cannot write series in " + cfg.out_dir);
}

void print_steady(const char* label, const PopulationRecord& r) {
    std::printf("%s P_S=%.4f P_T=%.4f P_uu=%.4f P_dd=%.4f P_a=%.4f P_leak=%.4f nbar_mode3=%.4f\n", label, r.pop.p_s,
                r.pop.p_t, r.pop.p_uu, r.pop.p_dd, r.pop.p_a, r.pop.p_leak, r.nbar3);
}

int run_protocol(const CommonOptions& o, ProtocolKind kind) {
    RunConfig cfg = resolve(o, kind == ProtocolKind::continuous ? "continuous_fig2" : "stepwise_fig3");
    cfg.experiment.kind = kind;
    const Series s = run_experiment(cfg.experiment);
    const std::string stem = protocol_name(kind);
    write_series(cfg, stem, s);
    const PopulationRecord steady = steady_value(cfg.experiment, s);
    write_manifest(cfg, std::string("run-") + stem, stem,
                   {{"steady.P_S", num(steady.pop.p_s)}, {"steady.P_leak", num(steady.pop.p_leak)}});
    print_steady("steady", steady);
    return 0;
}

int run_rate_model(const CommonOptions& o, const std::string& variant_flag) {
    RunConfig cfg = resolve(o, "continuous_fig2");
    if (!variant_flag.empty()) cfg.variant = variant_flag;
    const RateVariant variant = parse_variant(cfg.variant);
    cfg.variant = variant_name(variant);
    const auto& e = cfg.experiment.ensemble;
    const EffectiveRates rates =
        compute_effective_rates(ensemble_rate_params(cfg.experiment.params, e.r_mean, e.r_rms), variant);
    const ClosedForm cf = steady_state_closed_form(rates);

    const auto& sched = cfg.experiment.continuous;
    RatePopulations p0;
    p0.p_dd = 1.0;
    const auto samples = integrate_rate_equations(rates, p0, sched.resolved_samples(), true);
    std::ofstream f(output_path(cfg, "rate_model.csv"));
    f << "time_or_step,P_S,P_T,P_uu,P_dd,P_a,P_leak,nbar_mode3\n";
    for (const auto& s : samples)
        f << num(s.time) << ',' << num(s.pop.p_s) << ',' << num(s.pop.p_t) << ',' << num(s.pop.p_uu) << ','
          << num(s.pop.p_dd) << ",0," << num(s.pop.p_leak) << ",0\n";

    const std::vector<std::pair<std::string, std::string>> table{
        {"rate.gamma_plus", num(rates.gamma_plus)},
        {"rate.kappa_res", num(rates.kappa_res)},  {"rate.gamma_inh", num(rates.gamma_inh)},
        {"rate.Gamma_uu", num(rates.Gamma_uu)},    {"rate.Gamma_T", num(rates.Gamma_T)},
        {"rate.Gamma_dd", num(rates.Gamma_dd)},    {"rate.kappa_r", num(rates.kappa_r)},
        {"rate.kappa_4", num(rates.kappa_4)},      {"rate.Gamma_up_leak", num(rates.Gamma_up_leak)},
        {"rate.gamma_minus_uu", num(rates.gamma_minus_uu)}, {"rate.gamma_minus_T", num(rates.gamma_minus_T)},
        {"rate.gamma_minus_dd", num(rates.gamma_minus_dd)}, {"closed.fidelity", num(cf.fidelity)},
        {"closed.error", num(cf.error)}};
    write_manifest(cfg, "rate-model", "rate_model", table);
    for (const auto& [k, v] : table) std::printf("%-22s %s\n", k.c_str(), v.c_str());
    return 0;
}

int run_budget(const CommonOptions& o, const std::string& protocol, std::vector<std::string> ablations) {
    const bool stepwise = protocol == "stepwise";
    RunConfig cfg = resolve(o, stepwise ? "stepwise_fig3" : "continuous_fig2");
    if (!protocol.empty()) cfg.experiment.kind = stepwise ? ProtocolKind::stepwise : ProtocolKind::continuous;
    if (ablations.empty()) {
        ablations = {"spontaneous", "r", "mode4"};
        if (cfg.experiment.kind == ProtocolKind::stepwise) ablations.push_back("nbar");
    }
    const auto rows = error_budget(cfg.experiment, ablations);
    std::ofstream f(output_path(cfg, "error_budget.csv"));
    f << "ablation,P_S,delta_P_S,P_T,P_uu,P_dd,P_a,P_leak,nbar_mode3\n";
    for (const auto& r : rows) {
        const auto& p = r.steady.pop;
        f << r.name << ',' << num(p.p_s) << ',' << num(r.delta_p_s) << ',' << num(p.p_t) << ',' << num(p.p_uu)
          << ',' << num(p.p_dd) << ',' << num(p.p_a) << ',' << num(p.p_leak) << ',' << num(r.steady.nbar3) << '\n';
        std::printf("%-24s P_S=%.4f delta=%+.4f P_leak=%.4f\n", r.name.c_str(), p.p_s, r.delta_p_s, p.p_leak);
    }
    std::string joined;
    for (const auto& a : ablations) joined += (joined.empty() ? "" : ",") + a;
    write_manifest(cfg, "error-budget", "error_budget", {{"ablations", joined}});
    return 0;
}

int run_validate(const CommonOptions& o) {
    RunConfig cfg = resolve(o, "continuous_fig2");
    const auto checks = validate_model(cfg.experiment);
    bool ok = true;
    for (const auto& c : checks) {
        std::printf("%-28s %s value=%.3e limit=%.3e %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                    c.limit, c.detail.c_str());
        ok = ok && c.passed;
    }
    return ok ? 0 : kExitNumerical;
}

int run_convergence(const CommonOptions& o, double settle) {
    RunConfig cfg = resolve(o, "continuous_fig2");
    ConvergenceSpec spec;
    if (settle > 0) spec.settle = settle;
    const auto rows = convergence_study(cfg.experiment, spec);
    std::ofstream f(output_path(cfg, "convergence.csv"));
    f << "variant,mode3_dim,mode4_dim,tol,P_S,delta,limit,passed\n";
    bool ok = true;
    for (const auto& r : rows) {
        f << r.name << ',' << r.mode3_dim << ',' << r.mode4_dim << ',' << num(r.tol) << ',' << num(r.p_s) << ','
          << num(r.delta) << ',' << num(r.limit) << ',' << (r.passed ? 1 : 0) << '\n';
        std::printf("%-18s m3=%-2d m4=%-2d tol=%.1e P_S=%.6f delta=%+.2e %s\n", r.name.c_str(), r.mode3_dim,
                    r.mode4_dim, r.tol, r.p_s, r.delta, r.passed ? "ok" : "NOT CONVERGED");
        ok = ok && r.passed;
    }
    write_manifest(cfg, "convergence", "convergence", {{"settle", num(spec.settle)}, {"window", num(spec.window)}});
    return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative singlet-pumping simulator"};
    app.set_version_flag("--version", SPUMP_VERSION);
    app.require_subcommand(1);

    CommonOptions o;
    std::string variant, protocol, ablate;
    double settle = 0.0;

    auto* cont = app.add_subcommand("run-continuous", "Continuous pumping, ensemble averaged");
    auto* step = app.add_subcommand("run-stepwise", "Stepwise pumping, ensemble averaged");
    auto* rate = app.add_subcommand("rate-model", "Effective rates, closed form and rate equations");
    auto* budget = app.add_subcommand("error-budget", "Steady P_S with individual processes removed");
    auto* valid = app.add_subcommand("validate", "Invariant checks on the configured model");
    auto* conv = app.add_subcommand("convergence", "Truncation and tolerance sensitivity");
    for (auto* s : {cont, step, rate, budget, valid, conv}) add_common(s, o);
    rate->add_option("--variant", variant, "weak, broadened, thermal, thermal_4x");
    budget->add_option("--protocol", protocol, "continuous or stepwise")
        ->check(CLI::IsMember({"continuous", "stepwise"}));
    budget->add_option("--ablate", ablate, "Comma-separated ablations; '+' combines");
    conv->add_option("--settle", settle, "Evolution time after the seed state, seconds")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cont) return run_protocol(o, ProtocolKind::continuous);
        if (*step) return run_protocol(o, ProtocolKind::stepwise);
        if (*rate) return run_rate_model(o, variant);
        if (*budget) {
            std::vector<std::string> list;
            std::stringstream ss(ablate);
            for (std::string t; std::getline(ss, t, ',');)
                if (!t.empty()) list.push_back(t);
            return run_budget(o, protocol, list);
        }
        if (*valid) return run_validate(o);
        if (*conv) return run_convergence(o, settle);
    } catch (const ConfigParseError& e) {
        std::fprintf(stderr, "error: config parse: %s\n", e.what());
        return kExitConfig;
    } catch (const ConfigValidationError& e) {
        std::fprintf(stderr, "error: config validation: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "error: numerical: t=%.6e s: %s\n", e.time, e.what());
        return kExitNumerical;
    } catch (const DegenerateNullSpace& e) {
        std::fprintf(stderr, "error: numerical: %s (multiplicity %zu)\n", e.what(), e.multiplicity);
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: validation: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

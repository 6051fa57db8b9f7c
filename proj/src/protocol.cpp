#include "spump/protocol.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "spump/model.hpp"
#include "spump/quadrature.hpp"

namespace spump {
namespace {

DensityState initial_state(const HilbertLayout& layout, InitialSpin init) {
    const int d = layout.ion_levels();
    const Eigen::VectorXcd k = spin_ket(d, init.ion1, init.ion2);
    Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(layout.mode_dims()[0], layout.mode_dims()[0]);
    ground(0, 0) = 1.0;
    return DensityState::product(layout, k * k.adjoint(), ground);
}

/// Spin state kept, mode 3 replaced by a thermal state, mode 4 by vacuum.
DensityState thermal_reset(const DensityState& rho, double nbar) {
    const auto& layout = rho.layout();
    DensityState out =
        DensityState::product(layout, rho.spin_reduced(), thermal_mode_state(layout.mode_dims()[0], nbar));
    out.set_leaked(rho.leaked());
    return out;
}

void accumulate(Series& acc, const Series& s, double w) {
    if (acc.empty()) {
        acc.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) acc[i].time = s[i].time;
    }
    if (acc.size() != s.size()) throw std::logic_error("ensemble members returned series of different length");
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto& a = acc[i];
        const auto& b = s[i];
        a.pop.p_s += w * b.pop.p_s;
        a.pop.p_t += w * b.pop.p_t;
        a.pop.p_uu += w * b.pop.p_uu;
        a.pop.p_dd += w * b.pop.p_dd;
        a.pop.p_a += w * b.pop.p_a;
        a.pop.p_leak += w * b.pop.p_leak;
        a.nbar3 += w * b.nbar3;
    }
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

std::vector<double> ContinuousSchedule::resolved_samples() const {
    if (!sample_times.empty()) return sample_times;
    std::vector<double> out;
    if (sample_every <= 0) return {0.0, duration};
    const auto n = static_cast<std::size_t>(std::floor(duration / sample_every + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(duration, static_cast<double>(i) * sample_every));
    if (out.back() < duration) out.push_back(duration);
    return out;
}

const char* cooling_mode_name(CoolingMode m) { return m == CoolingMode::lindblad ? "lindblad" : "thermal_reset"; }
const char* protocol_name(ProtocolKind k) { return k == ProtocolKind::continuous ? "continuous" : "stepwise"; }

double compute_t2pi(const SchemeParams& p) {
    const double w = std::sqrt(p.omega_s * p.omega_s + p.omega_c * p.omega_c);
    if (w == 0.0) throw std::invalid_argument("t_2pi undefined: omega_s and omega_c are both zero");
    return kTwoPi / w;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Series run_continuous(const SchemeParams& p, const ContinuousSchedule& s, const NumericsSpec& num, InitialSpin init) {
    p.validate();
    if (!(s.duration >= 0)) throw std::invalid_argument("duration must be >= 0");
    const HilbertLayout layout = model_layout(p, s.channels, num.mode3_dim, num.mode4_dim, num.explicit_leak);
    const LindbladGenerator gen = assemble_generator(p, layout, s.channels);
    EvolveOptions opt;
    opt.tol = num.tol;
    opt.max_steps = num.max_steps;
    const Trajectory traj = evolve(initial_state(layout, init), gen, 0.0, s.duration, s.resolved_samples(), opt);
    return traj.records;
}

Series run_stepwise(const SchemeParams& p, const StepwiseSchedule& s, const NumericsSpec& num, InitialSpin init) {
    p.validate();
    if (s.n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
    if (s.t_cool < 0 || s.t_coh < 0 || s.t_repump < 0) throw std::invalid_argument("segment durations must be >= 0");
    const Channels& ch = s.channels;
    const HilbertLayout layout = model_layout(p, ch, num.mode3_dim, num.mode4_dim, num.explicit_leak);

    Channels coh = Channels::none();
    coh.sideband = ch.sideband;
    coh.carrier = ch.carrier;
    coh.spontaneous = ch.spontaneous;
    coh.mode4 = ch.mode4;
    Channels rep = Channels::none();
    rep.repump = ch.repump;
    rep.spontaneous = ch.spontaneous;
    Channels cool = Channels::none();
    cool.cooling = ch.cooling;
    cool.heating = ch.heating;

    const LindbladGenerator gen_coh = assemble_generator(p, layout, coh);
    const LindbladGenerator gen_rep = assemble_generator(p, layout, rep);
    const LindbladGenerator gen_cool = assemble_generator(p, layout, cool);
    const double t_coh = s.t_coh > 0 ? s.t_coh : compute_t2pi(p);
    const bool closed = gen_coh.jump_operators().empty() && gen_coh.loss_operators().empty() && gen_coh.time_independent();
    Eigen::MatrixXcd u;
    if (closed) u = unitary_propagator(gen_coh.static_hamiltonian(), t_coh);
    const double reset_nbar = ch.heating ? p.nbar : 0.0;

    DensityState rho = initial_state(layout, init);
    Series out;
    out.push_back(make_record(0.0, rho));
    double t = 0.0;
    for (int k = 1; k <= s.n_steps; ++k) {
        if (s.cooling_mode == CoolingMode::thermal_reset) {
            if (ch.cooling) rho = thermal_reset(rho, reset_nbar);
        } else {
            rho = evolve_state(rho, gen_cool, t, t + s.t_cool, num.tol, nullptr, num.max_steps);
        }
        t += s.t_cool;
        rho = closed ? apply_unitary(rho, u) : evolve_state(rho, gen_coh, t, t + t_coh, num.tol, nullptr, num.max_steps);
        t += t_coh;
        rho = evolve_state(rho, gen_rep, t, t + s.t_repump, num.tol, nullptr, num.max_steps);
        t += s.t_repump;
        const auto d = rho.diagnose(false);
        if (!d.finite) throw NumericalError(NumericalError::Kind::non_finite, t, "non-finite state in step " + std::to_string(k));
        if (d.trace_defect > 1e-9)
            throw NumericalError(NumericalError::Kind::trace_drift, t,
                                 "trace drift " + std::to_string(d.trace_defect) + " in step " + std::to_string(k));
        out.push_back(make_record(static_cast<double>(k), rho));
    }
    return out;
}

Series gaussian_average(const std::function<Series(double)>& runner, const EnsembleSpec& e, bool mirror_symmetric,
                        int threads) {
    if (e.r_rms < 0) throw std::invalid_argument("r_rms must be >= 0");
    if (e.nodes < 1 || e.nodes % 2 == 0) throw std::invalid_argument("quadrature node count must be odd and >= 1");
    if (e.r_rms == 0.0 || e.nodes == 1) return runner(e.r_mean);

    const GaussHermiteRule rule = gauss_hermite(e.nodes);
    // Distinct evaluations and their total weights.
    std::vector<double> xs, ws;
    for (int i = 0; i < e.nodes; ++i) {
        const double x = rule.nodes[i];
        if (mirror_symmetric && x < 0) continue;
        xs.push_back(x);
        ws.push_back(mirror_symmetric && x > 0 ? 2.0 * rule.weights[i] : rule.weights[i]);
    }
    std::vector<Series> results(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) { results[i] = runner(e.r_mean + e.r_rms * xs[i]); });
    Series avg;
    for (std::size_t i = 0; i < xs.size(); ++i) accumulate(avg, results[i], ws[i]);
    return avg;
}

Series run_experiment(const Experiment& x) {
    const bool symmetric = x.params.phi == 0.0 && x.initial.ion1 == x.initial.ion2;
    auto runner = [&x](double r) {
        SchemeParams p = x.params;
        p.r = r;
        return x.kind == ProtocolKind::continuous ? run_continuous(p, x.continuous, x.numerics, x.initial)
                                                  : run_stepwise(p, x.stepwise, x.numerics, x.initial);
    };
    return gaussian_average(runner, x.ensemble, symmetric && x.ensemble.r_mean == 0.0, x.numerics.threads);
}

PopulationRecord steady_value(const Experiment& x, const Series& s) {
    if (x.kind == ProtocolKind::continuous) return window_average(s, x.continuous.window_start, x.continuous.window_end);
    PopulationRecord acc;
    int count = 0;
    for (const auto& r : s) {
        const auto k = static_cast<int>(std::lround(r.time));
        if (k < x.stepwise.window_first || k > x.stepwise.window_last) continue;
        acc.pop.p_s += r.pop.p_s;
        acc.pop.p_t += r.pop.p_t;
        acc.pop.p_uu += r.pop.p_uu;
        acc.pop.p_dd += r.pop.p_dd;
        acc.pop.p_a += r.pop.p_a;
        acc.pop.p_leak += r.pop.p_leak;
        acc.nbar3 += r.nbar3;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("steady window contains no steps");
    const double w = 1.0 / count;
    acc.time = 0.5 * (x.stepwise.window_first + x.stepwise.window_last);
    acc.pop.p_s *= w;
    acc.pop.p_t *= w;
    acc.pop.p_uu *= w;
    acc.pop.p_dd *= w;
    acc.pop.p_a *= w;
    acc.pop.p_leak *= w;
    acc.nbar3 *= w;
    return acc;
}

Experiment Ablation::apply(const Experiment& base) const {
    Experiment x = base;
    std::stringstream ss(name);
    std::string tok;
    bool any = false;
    while (std::getline(ss, tok, '+')) {
        if (tok.empty()) continue;
        any = true;
        auto off = [&x](bool Channels::*field) {
            x.continuous.channels.*field = false;
            x.stepwise.channels.*field = false;
        };
        if (tok == "r") {
            x.ensemble.r_rms = 0.0;
            x.ensemble.r_mean = 0.0;
            x.params.r = 0.0;
        } else if (tok == "nbar") {
            x.params.nbar = 0.0;
        } else if (tok == "sideband") off(&Channels::sideband);
        else if (tok == "carrier") off(&Channels::carrier);
        else if (tok == "repump") off(&Channels::repump);
        else if (tok == "cooling") off(&Channels::cooling);
        else if (tok == "heating") off(&Channels::heating);
        else if (tok == "spontaneous") off(&Channels::spontaneous);
        else if (tok == "mode4") off(&Channels::mode4);
        else throw std::invalid_argument("unknown ablation '" + tok + "'");
    }
    if (!any) throw std::invalid_argument("empty ablation name");
    return x;
}

std::vector<BudgetRow> error_budget(const Experiment& base, const std::vector<std::string>& ablations) {
    std::vector<Experiment> xs{base};
    std::vector<std::string> names{"baseline"};
    for (const auto& a : ablations) {
        xs.push_back(Ablation{a}.apply(base));
        names.push_back(a);
    }
    std::vector<BudgetRow> rows(xs.size());
    const int total = resolve_threads(base.numerics.threads);
    const int inner = std::max(1, total / static_cast<int>(xs.size()));
    parallel_for(xs.size(), total, [&](std::size_t i) {
        Experiment x = xs[i];
        x.numerics.threads = inner;
        rows[i].name = names[i];
        rows[i].steady = steady_value(x, run_experiment(x));
    });
    for (auto& r : rows) r.delta_p_s = r.steady.pop.p_s - rows[0].steady.pop.p_s;
    return rows;
}

}  // namespace spump

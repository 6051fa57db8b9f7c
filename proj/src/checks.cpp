#include "spump/checks.hpp"

#include <cmath>
#include <sstream>

#include "spump/model.hpp"

namespace spump {
namespace {

CheckResult bound(std::string name, double value, double limit, std::string detail = {}) {
    return {std::move(name), std::isfinite(value) && value <= limit, value, limit, std::move(detail)};
}

SchemeParams at_mean_r(const Experiment& x) {
    SchemeParams p = x.params;
    p.r = x.ensemble.r_mean;
    return p;
}

const Channels& channels_of(const Experiment& x) {
    return x.kind == ProtocolKind::continuous ? x.continuous.channels : x.stepwise.channels;
}

DensityState start_state(const HilbertLayout& layout, InitialSpin init) {
    const Eigen::VectorXcd k = spin_ket(layout.ion_levels(), init.ion1, init.ion2);
    Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(layout.mode_dims()[0], layout.mode_dims()[0]);
    ground(0, 0) = 1.0;
    return DensityState::product(layout, k * k.adjoint(), ground);
}

double continuous_probe(const Experiment& x, int m3, int m4, double tol, const ConvergenceSpec& spec) {
    const SchemeParams p = at_mean_r(x);
    const Channels& ch = x.continuous.channels;

    SchemeParams closed = p;
    for (auto& [key, rate] : closed.spontaneous)
        if (key.second == Level::leak) rate = 0.0;
    Channels ch_closed = ch;
    ch_closed.mode4 = false;
    const HilbertLayout small = model_layout(closed, ch_closed, m3, m4, x.numerics.explicit_leak);
    const DensityState seed = liouvillian_nullspace(assemble_generator(closed, small, ch_closed));

    const HilbertLayout full = model_layout(p, ch, m3, m4, x.numerics.explicit_leak);
    const LindbladGenerator gen = assemble_generator(p, full, ch);
    std::vector<double> samples;
    const int n = 50;
    for (int i = 0; i <= n; ++i) samples.push_back(spec.settle - spec.window + spec.window * i / n);
    EvolveOptions opt;
    opt.tol = tol;
    const Trajectory traj = evolve(embed_state(seed, full), gen, 0.0, spec.settle, samples, opt);
    return window_average(traj.records, spec.settle - spec.window, spec.settle).pop.p_s;
}

double stepwise_probe(const Experiment& x, int m3, int m4, double tol) {
    NumericsSpec num = x.numerics;
    num.mode3_dim = m3;
    num.mode4_dim = m4;
    num.tol = tol;
    Experiment one = x;
    one.numerics = num;
    return steady_value(one, run_stepwise(at_mean_r(x), x.stepwise, num, x.initial)).pop.p_s;
}

}  // namespace

DensityState embed_state(const DensityState& rho, const HilbertLayout& target) {
    const HilbertLayout& src = rho.layout();
    if (src.ion_levels() > target.ion_levels() || src.mode_dims()[0] > target.mode_dims()[0] ||
        (src.has_mode4() && (!target.has_mode4() || src.mode_dims()[1] > target.mode_dims()[1])))
        throw std::invalid_argument("embed_state: target layout is smaller than the source");
    const std::size_t n = src.total_dim();
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = src.coordinates(i);
        map[i] = target.index(c.l1, c.l2, c.n3, src.has_mode4() ? c.n4 : 0);
    }
    DenseMat out = DenseMat::Zero(static_cast<Eigen::Index>(target.total_dim()),
                                  static_cast<Eigen::Index>(target.total_dim()));
    const DenseMat& in = rho.entries();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) =
                in(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return DensityState(target, std::move(out), rho.leaked());
}

std::vector<CheckResult> validate_model(const Experiment& x, double probe_time) {
    std::vector<CheckResult> out;
    const SchemeParams p = at_mean_r(x);
    try {
        p.validate();
        out.push_back({"parameters", true, 0.0, 0.0, "all constraints hold"});
    } catch (const std::exception& e) {
        out.push_back({"parameters", false, 1.0, 0.0, e.what()});
        return out;
    }
    const Channels& ch = channels_of(x);
    const HilbertLayout layout =
        model_layout(p, ch, x.numerics.mode3_dim, x.numerics.mode4_dim, x.numerics.explicit_leak);

    const QuantumOperator h = build_coherent_hamiltonian(p, layout, ch.sideband, ch.carrier);
    out.push_back(bound("hamiltonian_hermitian", h.hermiticity_defect(), 1e-12));
    if (layout.has_mode4()) {
        const QuantumOperator h4 = build_mode4_hamiltonian(p, layout, 1.234e-6);
        out.push_back(bound("mode4_hamiltonian_hermitian", h4.hermiticity_defect(), 1e-12));
    }

    // The dark state |D_phi>|0> must be annihilated by the balanced sideband drive.
    {
        SchemeParams balanced = p;
        balanced.r = 0.0;
        const QuantumOperator hs = build_coherent_hamiltonian(balanced, layout, true, false);
        Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(layout.mode_dims()[0], layout.mode_dims()[0]);
        ground(0, 0) = 1.0;
        const Eigen::VectorXcd d = dark_ket(layout.ion_levels(), p.phi);
        const DensityState dark = DensityState::product(layout, d * d.adjoint(), ground);
        const DenseMat hd = hs.entries() * dark.entries();
        const double scale = std::max(1.0, p.omega_s);
        out.push_back(bound("sideband_dark_state", hd.norm() / scale, 1e-12));
    }

    const LindbladGenerator gen = assemble_generator(p, layout, ch);

    // d/dt (trace + leaked) vanishes for an arbitrary state.
    {
        const std::size_t n = layout.total_dim();
        DenseMat m = DenseMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    cplx(std::cos(0.7 * i + 1.3 * j), std::sin(0.4 * i * j + 0.1));
        DenseMat r = m * m.adjoint();
        r /= r.trace().real();
        const DensityState probe(layout, std::move(r));
        const DensityState d = gen.derivative(0.5e-6, probe);
        double rate = 0.0;
        for (const auto& l : gen.jump_operators()) rate += l.entries().norm() * l.entries().norm();
        for (const auto& l : gen.loss_operators()) rate += l.entries().norm() * l.entries().norm();
        const double drift = std::abs(d.trace() + d.leaked()) / std::max(1.0, rate);
        out.push_back(bound("trace_conservation", drift, 1e-12));
    }

    try {
        std::vector<double> samples;
        for (int i = 0; i <= 20; ++i) samples.push_back(probe_time * i / 20);
        EvolveOptions opt;
        opt.tol = x.numerics.tol;
        const Trajectory traj = evolve(start_state(layout, x.initial), gen, 0.0, probe_time, samples, opt);
        out.push_back(bound("trace_drift", traj.max_trace_drift, opt.trace_limit));
        out.push_back(bound("min_eigenvalue", -traj.min_eigenvalue, -opt.eig_limit));
        double worst = 0.0;
        for (const auto& rec : traj.records) worst = std::max(worst, std::abs(rec.pop.sum() - 1.0));
        out.push_back(bound("population_sum", worst, 1e-8));
    } catch (const NumericalError& e) {
        std::ostringstream os;
        os << e.what() << " at t = " << e.time;
        out.push_back({"short_evolution", false, e.time, probe_time, os.str()});
    }
    return out;
}

std::vector<ConvergenceRow> convergence_study(const Experiment& x, const ConvergenceSpec& spec) {
    const int m3 = x.numerics.mode3_dim, m4 = x.numerics.mode4_dim;
    const double tol = x.numerics.tol;
    struct Variant {
        const char* name;
        int m3, m4;
        double tol, limit;
    };
    const Variant variants[] = {
        {"reference", m3, m4, tol, 0.0},
        {"double_truncation", 2 * m3, 2 * m4, tol, spec.truncation_limit},
        {"half_tolerance", m3, m4, 0.5 * tol, spec.tolerance_limit},
    };
    std::vector<ConvergenceRow> rows;
    for (const auto& v : variants) {
        ConvergenceRow row;
        row.name = v.name;
        row.mode3_dim = v.m3;
        row.mode4_dim = v.m4;
        row.tol = v.tol;
        row.limit = v.limit;
        row.p_s = x.kind == ProtocolKind::continuous ? continuous_probe(x, v.m3, v.m4, v.tol, spec)
                                                     : stepwise_probe(x, v.m3, v.m4, v.tol);
        rows.push_back(row);
    }
    for (auto& r : rows) {
        r.delta = r.p_s - rows[0].p_s;
        if (r.limit > 0) r.passed = std::abs(r.delta) < r.limit;
    }
    return rows;
}

}  // namespace spump

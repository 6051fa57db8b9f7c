#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "spump/dynamics.hpp"
#include "spump/kernels.hpp"

namespace spump {
namespace {

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// PI controller constants
constexpr double kSafe = 0.9, kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2, kFacMax = 10.0;

std::string at_time(double t) {
    std::ostringstream os;
    os.precision(12);
    os << " at t = " << t << " s";
    return os.str();
}

}  // namespace

NumericalError::NumericalError(Kind k, double t, const std::string& what)
    : std::runtime_error(what + at_time(t)), kind(k), time(t) {}

Dopri5::Dopri5(const LindbladGenerator& gen, IntegratorOptions opt)
    : gen_(gen), opt_(opt), n_(gen.state_size()) {
    for (auto& k : k_) k.resize(n_);
    for (auto& r : rc_) r.resize(n_);
    ytmp_.resize(n_);
    ynew_.resize(n_);
    err_.resize(n_);
}

void Dopri5::rhs(double t, const cplx* y, cplx* dy) {
    gen_.apply(t, y, dy);
    ++stats_.rhs_evals;
}

double Dopri5::initial_step(const std::vector<cplx>& y, double t0, double span) {
    const auto& kt = kernels::active();
    const double nf = static_cast<double>(n_);
    const double dnf = kt.weighted_sq_norm(n_, k_[0].data(), y.data(), y.data(), opt_.atol, opt_.rtol) / nf;
    const double dny = kt.weighted_sq_norm(n_, y.data(), y.data(), y.data(), opt_.atol, opt_.rtol) / nf;
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, span);
    const double hc = h;
    kt.lincomb(n_, y.data(), 1, &hc, std::array<const cplx*, 1>{k_[0].data()}.data(), ytmp_.data());
    rhs(t0 + h, ytmp_.data(), k_[1].data());
    for (std::size_t i = 0; i < n_; ++i) err_[i] = k_[1][i] - k_[0][i];
    const double der2 = std::sqrt(kt.weighted_sq_norm(n_, err_.data(), y.data(), y.data(), opt_.atol, opt_.rtol) / nf) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6 * span, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, span});
}

void Dopri5::integrate(std::vector<cplx>& y, double t0, double t1, const std::vector<double>& samples,
                       const Observer& observe) {
    if (y.size() != n_) throw std::invalid_argument("integrate: state size does not match generator");
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 < t0");
    const auto& kt = kernels::active();

    std::size_t si = 0;
    while (si < samples.size() && samples[si] < t0) ++si;
    auto emit_exact = [&](double t, const cplx* yy) {
        while (si < samples.size() && samples[si] <= t) {
            if (observe) observe(samples[si], yy);
            ++si;
        }
    };
    emit_exact(t0, y.data());
    if (t1 == t0) return;

    const double span = t1 - t0;
    const double hmax = opt_.h_max > 0 ? std::min(opt_.h_max, span) : span;
    double t = t0;
    rhs(t, y.data(), k_[0].data());
    double h = h_last_ > 0 ? std::min(h_last_, hmax) : std::min(initial_step(y, t0, span), hmax);
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;
    const double nf = static_cast<double>(n_);

    while (t < t1) {
        if (++steps > opt_.max_steps) throw NumericalError(NumericalError::Kind::step_limit, t, "step limit reached");
        bool last = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), std::abs(t1)))
            throw NumericalError(NumericalError::Kind::step_underflow, t, "step size underflow (h = " + std::to_string(h) + ")");

        auto stage = [&](std::initializer_list<double> coefs, std::initializer_list<const cplx*> terms, cplx* out) {
            double c[7];
            std::size_t m = 0;
            for (double v : coefs) c[m++] = h * v;
            kt.lincomb(n_, y.data(), m, c, std::data(terms), out);
        };
        stage({a21}, {k_[0].data()}, ytmp_.data());
        rhs(t + c2 * h, ytmp_.data(), k_[1].data());
        stage({a31, a32}, {k_[0].data(), k_[1].data()}, ytmp_.data());
        rhs(t + c3 * h, ytmp_.data(), k_[2].data());
        stage({a41, a42, a43}, {k_[0].data(), k_[1].data(), k_[2].data()}, ytmp_.data());
        rhs(t + c4 * h, ytmp_.data(), k_[3].data());
        stage({a51, a52, a53, a54}, {k_[0].data(), k_[1].data(), k_[2].data(), k_[3].data()}, ytmp_.data());
        rhs(t + c5 * h, ytmp_.data(), k_[4].data());
        stage({a61, a62, a63, a64, a65}, {k_[0].data(), k_[1].data(), k_[2].data(), k_[3].data(), k_[4].data()},
              ytmp_.data());
        rhs(t + h, ytmp_.data(), k_[5].data());
        stage({a71, a73, a74, a75, a76}, {k_[0].data(), k_[2].data(), k_[3].data(), k_[4].data(), k_[5].data()},
              ynew_.data());
        rhs(t + h, ynew_.data(), k_[6].data());

        {
            const double ce[6] = {h * e1, h * e3, h * e4, h * e5, h * e6, h * e7};
            const cplx* te[6] = {k_[0].data(), k_[2].data(), k_[3].data(), k_[4].data(), k_[5].data(), k_[6].data()};
            std::fill(err_.begin(), err_.end(), cplx(0.0));
            kt.lincomb(n_, err_.data(), 6, ce, te, err_.data());
        }
        const double err = std::sqrt(kt.weighted_sq_norm(n_, err_.data(), y.data(), ynew_.data(), opt_.atol, opt_.rtol) / nf);
        if (!std::isfinite(err)) throw NumericalError(NumericalError::Kind::non_finite, t, "non-finite state");

        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
            double hnew = h / fac;
            facold = std::max(err, 1e-4);
            ++stats_.accepted;

            const double tn = last ? t1 : t + h;
            if (si < samples.size() && samples[si] < tn) {
                for (std::size_t i = 0; i < n_; ++i) {
                    const cplx dy = ynew_[i] - y[i];
                    const cplx bspl = h * k_[0][i] - dy;
                    rc_[0][i] = y[i];
                    rc_[1][i] = dy;
                    rc_[2][i] = bspl;
                    rc_[3][i] = dy - h * k_[6][i] - bspl;
                    rc_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] + d6 * k_[5][i] +
                                     d7 * k_[6][i]);
                }
                std::vector<cplx>& out = ytmp_;
                while (si < samples.size() && samples[si] < tn) {
                    const double s = (samples[si] - t) / h, s1 = 1.0 - s;
                    for (std::size_t i = 0; i < n_; ++i)
                        out[i] = rc_[0][i] + s * (rc_[1][i] + s1 * (rc_[2][i] + s * (rc_[3][i] + s1 * rc_[4][i])));
                    if (observe) observe(samples[si], out.data());
                    ++si;
                }
            }
            y.swap(ynew_);
            k_[0].swap(k_[6]);
            t = tn;
            emit_exact(t, y.data());
            if (last_rejected) hnew = std::min(hnew, h);
            last_rejected = false;
            if (!last) h_last_ = h;
            h = std::min(hnew, hmax);
        } else {
            h = h / std::min(1.0 / kFacMin, fac11 / kSafe);
            last_rejected = true;
            ++stats_.rejected;
        }
    }
    (void)nf;
}

std::vector<cplx> flatten(const DensityState& rho) {
    const std::size_t n = rho.dim();
    std::vector<cplx> y(n * n + 1);
    std::copy(rho.entries().data(), rho.entries().data() + n * n, y.begin());
    y[n * n] = rho.leaked();
    return y;
}

DensityState unflatten(const HilbertLayout& layout, const std::vector<cplx>& y) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    if (y.size() != static_cast<std::size_t>(n * n + 1)) throw LayoutMismatch("flat state size mismatch");
    DenseMat m = Eigen::Map<const DenseMat>(y.data(), n, n);
    return DensityState(layout, std::move(m), y.back().real());
}

Trajectory evolve(const DensityState& rho0, const LindbladGenerator& gen, double t0, double t1,
                  const std::vector<double>& sample_times, const EvolveOptions& opt) {
    if (!(opt.tol >= 1e-12 && opt.tol <= 1e-4)) throw std::invalid_argument("tol must lie in [1e-12, 1e-4]");
    if (rho0.layout() != gen.layout()) throw LayoutMismatch("evolve: state and generator layouts differ");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("sample times must be sorted");
    for (double s : sample_times)
        if (s < t0 || s > t1) throw std::invalid_argument("sample time outside the integration span");

    Trajectory traj{{}, {}, {}, {}, rho0, {}};
    traj.times.reserve(sample_times.size());
    traj.records.reserve(sample_times.size());

    auto inspect = [&](const DensityState& s, double t) {
        const auto d = s.diagnose(opt.check_spectrum);
        if (!d.finite) throw NumericalError(NumericalError::Kind::non_finite, t, "non-finite density matrix");
        traj.max_trace_drift = std::max(traj.max_trace_drift, d.trace_defect);
        if (d.trace_defect > opt.trace_limit)
            throw NumericalError(NumericalError::Kind::trace_drift, t,
                                 "trace drift " + std::to_string(d.trace_defect) + " beyond limit");
        if (opt.check_spectrum) {
            traj.min_eigenvalue = std::min(traj.min_eigenvalue, d.min_eigenvalue);
            if (d.min_eigenvalue < opt.eig_limit)
                throw NumericalError(NumericalError::Kind::positivity, t,
                                     "negative eigenvalue " + format_sci(d.min_eigenvalue));
        }
    };
    (void)inspect;

    IntegratorOptions io{.rtol = opt.tol, .atol = 0.1 * opt.tol};
    if (opt.max_steps) io.max_steps = opt.max_steps;
    Dopri5 integ(gen, io);
    std::vector<cplx> y = flatten(rho0);
    const std::size_t every = std::max<std::size_t>(opt.checkpoint_every, 1);
    integ.integrate(y, t0, t1, sample_times, [&](double t, const cplx* yp) {
        const std::size_t idx = traj.times.size();
        const auto n = static_cast<Eigen::Index>(gen.dim());
        DensityState s(gen.layout(), Eigen::Map<const DenseMat>(yp, n, n), yp[n * n].real());
        traj.times.push_back(t);
        traj.records.push_back(make_record(t, s));
        const bool keep = opt.storage == StorageMode::states || idx % every == 0;
        const double drift = std::abs(s.trace().real() + s.leaked() - 1.0);
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        if (drift > opt.trace_limit)
            throw NumericalError(NumericalError::Kind::trace_drift, t, "trace drift " + std::to_string(drift) + " beyond limit");
        if (keep) {
            inspect(s, t);
            traj.states.push_back(std::move(s));
            traj.state_index.push_back(idx);
        }
    });
    traj.final_state = unflatten(gen.layout(), y);
    inspect(traj.final_state, t1);
    traj.stats = integ.stats();
    return traj;
}

DensityState evolve_state(const DensityState& rho0, const LindbladGenerator& gen, double t0, double t1, double tol,
                          IntegratorStats* stats, std::size_t max_steps) {
    if (rho0.layout() != gen.layout()) throw LayoutMismatch("evolve: state and generator layouts differ");
    if (gen.is_zero()) return rho0;
    IntegratorOptions io{.rtol = tol, .atol = 0.1 * tol};
    if (max_steps) io.max_steps = max_steps;
    Dopri5 integ(gen, io);
    std::vector<cplx> y = flatten(rho0);
    integ.integrate(y, t0, t1);
    if (stats) *stats += integ.stats();
    return unflatten(gen.layout(), y);
}

}  // namespace spump

#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#include <Eigen/OrderingMethods>

#include <cmath>

#include "spump/dynamics.hpp"

namespace spump {
namespace {

void add_scaled(PopulationRecord& acc, const PopulationRecord& r, double w) {
    acc.pop.p_s += w * r.pop.p_s;
    acc.pop.p_t += w * r.pop.p_t;
    acc.pop.p_uu += w * r.pop.p_uu;
    acc.pop.p_dd += w * r.pop.p_dd;
    acc.pop.p_a += w * r.pop.p_a;
    acc.pop.p_leak += w * r.pop.p_leak;
    acc.nbar3 += w * r.nbar3;
}

}  // namespace

PopulationRecord window_average(const std::vector<PopulationRecord>& series, double ta, double tb) {
    if (series.empty()) throw std::invalid_argument("steady_by_window: empty trajectory");
    if (tb < ta) throw std::invalid_argument("steady_by_window: window end before start");
    if (ta == tb) {
        auto best = series.begin();
        for (auto it = series.begin(); it != series.end(); ++it)
            if (std::abs(it->time - ta) < std::abs(best->time - ta)) best = it;
        return *best;
    }
    std::vector<const PopulationRecord*> in;
    for (const auto& r : series)
        if (r.time >= ta && r.time <= tb) in.push_back(&r);
    if (in.empty()) throw std::invalid_argument("steady_by_window: no samples inside the window");
    if (in.size() == 1) return *in.front();

    PopulationRecord acc;
    double total = 0.0;
    auto add = [&acc](const PopulationRecord& r, double w) { add_scaled(acc, r, w); };
    for (std::size_t i = 0; i + 1 < in.size(); ++i) {
        const double w = 0.5 * (in[i + 1]->time - in[i]->time);
        add(*in[i], w);
        add(*in[i + 1], w);
        total += 2.0 * w;
    }
    if (total <= 0.0) return *in.front();
    PopulationRecord out;
    out.time = 0.5 * (in.front()->time + in.back()->time);
    add_scaled(out, acc, 1.0 / total);
    return out;
}

PopulationRecord steady_by_window(const Trajectory& traj, double ta, double tb) {
    return window_average(traj.records, ta, tb);
}

DegenerateNullSpace::DegenerateNullSpace(std::size_t m, const std::string& what)
    : std::runtime_error(what + " (null-space multiplicity " + std::to_string(m) + ")"), multiplicity(m) {}

DensityState liouvillian_nullspace(const LindbladGenerator& gen) {
    if (!gen.time_independent()) throw std::invalid_argument("liouvillian_nullspace: generator is time dependent");
    if (!gen.trace_preserving())
        throw std::invalid_argument("liouvillian_nullspace: generator has absorbing loss channels");
    using ColSparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
    const std::size_t n = gen.dim();
    const auto nn = static_cast<Eigen::Index>(n * n);
    const Eigen::SparseMatrix<cplx> s = gen.superoperator(0.0);

    // Replace the first equation by the trace condition.
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(s.nonZeros()) + n);
    for (Eigen::Index k = 0; k < s.outerSize(); ++k)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(s, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (std::size_t i = 0; i < n; ++i) trip.emplace_back(0, static_cast<int>(i * n + i), cplx(1.0));
    ColSparse a(nn, nn);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();

    auto multiplicity = [&]() -> std::size_t {
        ColSparse sc = s;
        sc.makeCompressed();
        Eigen::SparseQR<ColSparse, Eigen::COLAMDOrdering<int>> qr;
        qr.setPivotThreshold(1e-10);
        qr.compute(sc);
        return static_cast<std::size_t>(nn - qr.rank());
    };

    Eigen::SparseLU<ColSparse, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw DegenerateNullSpace(multiplicity(), "liouvillian_nullspace: singular system");
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nn);
    b(0) = 1.0;
    const Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw DegenerateNullSpace(multiplicity(), "liouvillian_nullspace: solve failed");
    const double resid = (s * x).norm();
    const double scale = std::max(1.0, s.cwiseAbs().sum() / static_cast<double>(nn));
    if (resid > 1e-8 * scale * std::max(1.0, x.norm()))
        throw DegenerateNullSpace(multiplicity(), "liouvillian_nullspace: no unique steady state");

    DenseMat rho = Eigen::Map<const DenseMat>(x.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityState(gen.layout(), std::move(rho));
}

}  // namespace spump

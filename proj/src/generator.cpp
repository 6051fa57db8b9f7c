#include "spump/generator.hpp"

#include <cmath>
#include <map>

#include "spump/kernels.hpp"

namespace spump {

std::vector<LindbladGenerator::Entry> LindbladGenerator::entries_of(const SparseMat& m) {
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (Eigen::Index i = 0; i < m.outerSize(); ++i)
        for (SparseMat::InnerIterator it(m, i); it; ++it)
            out.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
    return out;
}

LindbladGenerator::LindbladGenerator(HilbertLayout layout, QuantumOperator hamiltonian,
                                     std::vector<OscillatingTerm> oscillating, std::vector<QuantumOperator> jumps,
                                     std::vector<QuantumOperator> losses)
    : layout_(std::move(layout)),
      n_(layout_.total_dim()),
      hamiltonian_(std::move(hamiltonian)),
      oscillating_(std::move(oscillating)),
      jumps_(std::move(jumps)),
      losses_(std::move(losses)) {
    auto check = [this](const QuantumOperator& op, const char* what) {
        if (op.layout() != layout_) throw LayoutMismatch(std::string("generator: ") + what + " layout mismatch");
    };
    check(hamiltonian_, "hamiltonian");
    for (const auto& t : oscillating_) check(t.coupling, "oscillating term");
    for (const auto& l : jumps_) check(l, "jump operator");
    for (const auto& l : losses_) check(l, "loss operator");

    std::erase_if(jumps_, [](const QuantumOperator& l) { return l.is_zero(); });
    std::erase_if(losses_, [](const QuantumOperator& l) { return l.is_zero(); });

    const auto n = static_cast<Eigen::Index>(n_);
    SparseMat decay(n, n);
    for (const auto& l : jumps_) decay += SparseMat(SparseMat(l.entries().adjoint()) * l.entries());
    SparseMat loss(n, n);
    for (const auto& k : losses_) loss += SparseMat(SparseMat(k.entries().adjoint()) * k.entries());
    loss.prune(cplx(0.0));
    loss_rate_ = entries_of(loss);

    const cplx mi(0.0, -1.0);
    minus_i_heff_ = mi * hamiltonian_.entries() - 0.5 * (decay + loss);
    minus_i_heff_.prune(cplx(0.0));
    minus_i_heff_.makeCompressed();

    for (const auto& t : oscillating_) {
        osc_forward_.push_back(entries_of(t.coupling.entries()));
        osc_backward_.push_back(entries_of(SparseMat(t.coupling.entries().adjoint())));
    }
    for (const auto& l : jumps_) jump_entries_.push_back(entries_of(l.entries()));

    std::map<std::pair<std::uint32_t, std::uint32_t>, cplx> merged;
    for (const auto& entries : jump_entries_)
        for (const Entry& a : entries)
            for (const Entry& b : entries) {
                const auto dst = static_cast<std::uint32_t>(static_cast<std::size_t>(a.row) * n_ + b.row);
                const auto src = static_cast<std::uint32_t>(static_cast<std::size_t>(a.col) * n_ + b.col);
                merged[{dst, src}] += a.value * std::conj(b.value);
            }
    transfers_.reserve(merged.size());
    for (const auto& [key, v] : merged)
        if (v != cplx(0.0)) transfers_.push_back({key.first, key.second, v.real(), v.imag()});
}

bool LindbladGenerator::is_zero() const {
    if (!hamiltonian_.is_zero() || !jumps_.empty() || !losses_.empty()) return false;
    for (const auto& t : oscillating_)
        if (!t.coupling.is_zero()) return false;
    return true;
}

QuantumOperator LindbladGenerator::hamiltonian(double t) const {
    QuantumOperator h = hamiltonian_;
    for (const auto& term : oscillating_) {
        const cplx phase = std::polar(1.0, -term.omega * t);
        h += phase * term.coupling + std::conj(phase) * term.coupling.adjoint();
    }
    return h;
}

void LindbladGenerator::apply(double t, const cplx* y, cplx* dy) const {
    const auto& k = kernels::active();
    const std::size_t n = n_;
    thread_local std::vector<cplx> scratch;
    scratch.assign(n * n, cplx(0.0));
    cplx* work = scratch.data();

    // work = -i H_eff rho, row by row
    const int* outer = minus_i_heff_.outerIndexPtr();
    const int* inner = minus_i_heff_.innerIndexPtr();
    const cplx* val = minus_i_heff_.valuePtr();
    for (std::size_t i = 0; i < n; ++i)
        for (int p = outer[i]; p < outer[i + 1]; ++p) k.axpy(n, val[p], y + static_cast<std::size_t>(inner[p]) * n, work + i * n);

    const cplx mi(0.0, -1.0);
    for (std::size_t m = 0; m < oscillating_.size(); ++m) {
        const cplx phase = std::polar(1.0, -oscillating_[m].omega * t);
        for (const Entry& e : osc_forward_[m])
            k.axpy(n, mi * phase * e.value, y + static_cast<std::size_t>(e.col) * n, work + static_cast<std::size_t>(e.row) * n);
        for (const Entry& e : osc_backward_[m])
            k.axpy(n, mi * std::conj(phase) * e.value, y + static_cast<std::size_t>(e.col) * n,
                   work + static_cast<std::size_t>(e.row) * n);
    }

    // -i H_eff rho + i rho H_eff^+ = work + work^+ for Hermitian rho
    k.hermitian_sum(n, work, dy);

    double* out = reinterpret_cast<double*>(dy);
    const double* in = reinterpret_cast<const double*>(y);
    for (const Transfer& t : transfers_) {
        const double xr = in[2 * t.src], xi = in[2 * t.src + 1];
        out[2 * t.dst] += t.re * xr - t.im * xi;
        out[2 * t.dst + 1] += t.re * xi + t.im * xr;
    }

    double leak_rate = 0.0;
    for (const Entry& e : loss_rate_) leak_rate += (e.value * y[static_cast<std::size_t>(e.col) * n + e.row]).real();
    dy[n * n] = cplx(leak_rate, 0.0);
}

DensityState LindbladGenerator::derivative(double t, const DensityState& rho) const {
    if (rho.layout() != layout_) throw LayoutMismatch("derivative: layout mismatch");
    std::vector<cplx> y(state_size()), dy(state_size());
    std::copy(rho.entries().data(), rho.entries().data() + n_ * n_, y.begin());
    y[n_ * n_] = rho.leaked();
    apply(t, y.data(), dy.data());
    DenseMat d = Eigen::Map<const DenseMat>(dy.data(), static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    return DensityState(layout_, std::move(d), dy[n_ * n_].real());
}

Eigen::SparseMatrix<cplx> LindbladGenerator::superoperator(double t) const {
    const std::size_t n = n_;
    SparseMat heff = minus_i_heff_;
    const cplx mi(0.0, -1.0);
    for (const auto& term : oscillating_) {
        const cplx phase = std::polar(1.0, -term.omega * t);
        heff += (mi * phase) * term.coupling.entries() + (mi * std::conj(phase)) * SparseMat(term.coupling.entries().adjoint());
    }
    const auto he = entries_of(heff);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(2 * he.size() * n);
    auto idx = [n](std::size_t i, std::size_t j) { return static_cast<int>(i * n + j); };
    for (const Entry& e : he)
        for (std::size_t j = 0; j < n; ++j) {
            // (-i Heff rho)_{row, j}
            trip.emplace_back(idx(e.row, j), idx(e.col, j), e.value);
            // (rho (-i Heff)^+)_{j, row} = sum_l rho_{j l} conj(-i Heff)_{row l}
            trip.emplace_back(idx(j, e.row), idx(j, e.col), std::conj(e.value));
        }
    for (const Transfer& t : transfers_)
        trip.emplace_back(static_cast<int>(t.dst), static_cast<int>(t.src), cplx(t.re, t.im));
    const auto nn = static_cast<Eigen::Index>(n * n);
    Eigen::SparseMatrix<cplx> s(nn, nn);
    s.setFromTriplets(trip.begin(), trip.end());
    s.prune(cplx(0.0));
    return s;
}

}  // namespace spump

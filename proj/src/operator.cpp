#include "spump/operator.hpp"

#include <vector>

namespace spump {

QuantumOperator::QuantumOperator(HilbertLayout layout)
    : layout_(std::move(layout)),
      entries_(static_cast<Eigen::Index>(layout_.total_dim()), static_cast<Eigen::Index>(layout_.total_dim())) {}

QuantumOperator::QuantumOperator(HilbertLayout layout, SparseMat entries)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (entries_.rows() != n || entries_.cols() != n)
        throw LayoutMismatch("operator entries do not match layout dimension");
    entries_.prune(cplx(0.0));
    entries_.makeCompressed();
}

QuantumOperator QuantumOperator::identity(const HilbertLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    SparseMat id(n, n);
    id.setIdentity();
    return QuantumOperator(layout, std::move(id));
}

void QuantumOperator::require_same_layout(const QuantumOperator& o) const {
    if (layout_ != o.layout_)
        throw LayoutMismatch("layout mismatch: " + layout_.describe() + " vs " + o.layout_.describe());
}

QuantumOperator QuantumOperator::adjoint() const {
    SparseMat adj = entries_.adjoint();
    return QuantumOperator(layout_, std::move(adj));
}

double QuantumOperator::hermiticity_defect() const {
    SparseMat diff = entries_ - SparseMat(entries_.adjoint());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMat::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

QuantumOperator& QuantumOperator::operator+=(const QuantumOperator& o) {
    require_same_layout(o);
    entries_ = entries_ + o.entries_;
    entries_.prune(cplx(0.0));
    return *this;
}

QuantumOperator& QuantumOperator::operator-=(const QuantumOperator& o) {
    require_same_layout(o);
    entries_ = entries_ - o.entries_;
    entries_.prune(cplx(0.0));
    return *this;
}

QuantumOperator& QuantumOperator::operator*=(cplx s) {
    entries_ *= s;
    entries_.prune(cplx(0.0));
    return *this;
}

QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b) {
    a.require_same_layout(b);
    SparseMat prod = a.entries_ * b.entries_;
    return QuantumOperator(a.layout_, std::move(prod));
}

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b) { return a * b - b * a; }

LocalMat ion_transition(const HilbertLayout& layout, Level to, Level from) {
    if (!layout.has_level(to) || !layout.has_level(from))
        throw std::invalid_argument(std::string("level ") + level_name(layout.has_level(to) ? from : to) +
                                    " is not part of a " + std::to_string(layout.ion_levels()) + "-level layout");
    LocalMat m = LocalMat::Zero(layout.ion_levels(), layout.ion_levels());
    m(static_cast<int>(to), static_cast<int>(from)) = 1.0;
    return m;
}

QuantumOperator embed_ion_operator(const HilbertLayout& layout, int ion_index, const LocalMat& local) {
    const int d = layout.ion_levels();
    if (ion_index != 1 && ion_index != 2)
        throw std::invalid_argument("ion_index must be 1 or 2, got " + std::to_string(ion_index));
    if (local.rows() != d || local.cols() != d)
        throw LayoutMismatch("local ion operator must be " + std::to_string(d) + "x" + std::to_string(d));

    const std::size_t mb = layout.mode_block();
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const cplx v = local(a, b);
            if (v == cplx(0.0)) continue;
            for (int other = 0; other < d; ++other)
                for (std::size_t m = 0; m < mb; ++m) {
                    const std::size_t row = ion_index == 1 ? (static_cast<std::size_t>(a) * d + other) * mb + m
                                                           : (static_cast<std::size_t>(other) * d + a) * mb + m;
                    const std::size_t col = ion_index == 1 ? (static_cast<std::size_t>(b) * d + other) * mb + m
                                                           : (static_cast<std::size_t>(other) * d + b) * mb + m;
                    trip.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
                }
        }
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    SparseMat op(n, n);
    op.setFromTriplets(trip.begin(), trip.end());
    return QuantumOperator(layout, std::move(op));
}

QuantumOperator mode_lowering(const HilbertLayout& layout, int mode_index) {
    if (mode_index < 0 || static_cast<std::size_t>(mode_index) >= layout.mode_count())
        throw std::invalid_argument("mode index " + std::to_string(mode_index) + " not present in layout " +
                                    layout.describe());
    const int n3 = layout.mode_dims()[0];
    const int n4 = layout.has_mode4() ? layout.mode_dims()[1] : 1;
    const int spin = layout.ion_levels() * layout.ion_levels();
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int s = 0; s < spin; ++s)
        for (int a = 0; a < n3; ++a)
            for (int c = 0; c < n4; ++c) {
                const int occ = mode_index == 0 ? a : c;
                if (occ == 0) continue;
                const int a2 = mode_index == 0 ? a - 1 : a;
                const int c2 = mode_index == 0 ? c : c - 1;
                const int row = (s * n3 + a2) * n4 + c2;
                const int col = (s * n3 + a) * n4 + c;
                trip.emplace_back(row, col, std::sqrt(static_cast<double>(occ)));
            }
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    SparseMat op(n, n);
    op.setFromTriplets(trip.begin(), trip.end());
    return QuantumOperator(layout, std::move(op));
}

QuantumOperator spin_projector(const HilbertLayout& layout, const Eigen::VectorXcd& spin_ket) {
    const int spin = layout.ion_levels() * layout.ion_levels();
    if (spin_ket.size() != spin) throw LayoutMismatch("spin ket length must be ion_levels^2");
    const std::size_t mb = layout.mode_block();
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int a = 0; a < spin; ++a)
        for (int b = 0; b < spin; ++b) {
            const cplx v = spin_ket(a) * std::conj(spin_ket(b));
            if (v == cplx(0.0)) continue;
            for (std::size_t m = 0; m < mb; ++m)
                trip.emplace_back(static_cast<int>(a * mb + m), static_cast<int>(b * mb + m), v);
        }
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    SparseMat op(n, n);
    op.setFromTriplets(trip.begin(), trip.end());
    return QuantumOperator(layout, std::move(op));
}

}  // namespace spump

#include "spump/density.hpp"

#include <cmath>

namespace spump {

DensityState::DensityState(HilbertLayout layout)
    : layout_(std::move(layout)),
      rho_(DenseMat::Zero(static_cast<Eigen::Index>(layout_.total_dim()), static_cast<Eigen::Index>(layout_.total_dim()))) {}

DensityState::DensityState(HilbertLayout layout, DenseMat entries, double leaked)
    : layout_(std::move(layout)), rho_(std::move(entries)), leaked_(leaked) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (rho_.rows() != n || rho_.cols() != n) throw LayoutMismatch("density matrix does not match layout");
}

DensityState DensityState::pure(const HilbertLayout& layout, const Eigen::VectorXcd& ket) {
    if (ket.size() != static_cast<Eigen::Index>(layout.total_dim())) throw LayoutMismatch("ket length mismatch");
    const Eigen::VectorXcd k = ket / ket.norm();
    return DensityState(layout, k * k.adjoint());
}

DensityState DensityState::basis(const HilbertLayout& layout, std::size_t flat_index) {
    DensityState s(layout);
    s.rho_(static_cast<Eigen::Index>(flat_index), static_cast<Eigen::Index>(flat_index)) = 1.0;
    return s;
}

DensityState DensityState::product(const HilbertLayout& layout, const Eigen::MatrixXcd& spin,
                                   const Eigen::MatrixXcd& mode3) {
    const int s = layout.ion_levels() * layout.ion_levels();
    const int n3 = layout.mode_dims()[0];
    if (spin.rows() != s || mode3.rows() != n3) throw LayoutMismatch("product factors do not match layout");
    const int n4 = layout.has_mode4() ? layout.mode_dims()[1] : 1;
    DensityState out(layout);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
            if (spin(a, b) == cplx(0.0)) continue;
            for (int m = 0; m < n3; ++m)
                for (int mm = 0; mm < n3; ++mm)
                    out.rho_((a * n3 + m) * n4, (b * n3 + mm) * n4) = spin(a, b) * mode3(m, mm);
        }
    return out;
}

double DensityState::purity() const { return (rho_ * rho_).trace().real(); }

Eigen::MatrixXcd DensityState::spin_reduced() const {
    const int s = layout_.ion_levels() * layout_.ion_levels();
    const auto mb = static_cast<Eigen::Index>(layout_.mode_block());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(s, s);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) out(a, b) = rho_.block(a * mb, b * mb, mb, mb).trace();
    return out;
}

Eigen::MatrixXcd DensityState::mode_reduced(int mode_index) const {
    if (mode_index < 0 || static_cast<std::size_t>(mode_index) >= layout_.mode_count())
        throw std::invalid_argument("mode index not in layout");
    const int s = layout_.ion_levels() * layout_.ion_levels();
    const int n3 = layout_.mode_dims()[0];
    const int n4 = layout_.has_mode4() ? layout_.mode_dims()[1] : 1;
    const int d = mode_index == 0 ? n3 : n4;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int sp = 0; sp < s; ++sp)
        for (int a = 0; a < n3; ++a)
            for (int c = 0; c < n4; ++c)
                for (int m = 0; m < d; ++m) {
                    const int a2 = mode_index == 0 ? m : a;
                    const int c2 = mode_index == 0 ? c : m;
                    const int row = (sp * n3 + a) * n4 + c;
                    const int col = (sp * n3 + a2) * n4 + c2;
                    out(mode_index == 0 ? a : c, m) += rho_(row, col);
                }
    return out;
}

double DensityState::mean_occupation(int mode_index) const {
    const Eigen::MatrixXcd m = mode_reduced(mode_index);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < m.rows(); ++k) acc += static_cast<double>(k) * m(k, k).real();
    return acc;
}

DensityState::Diagnostics DensityState::diagnose(bool with_spectrum) const {
    Diagnostics d{};
    d.finite = rho_.allFinite();
    d.hermiticity_defect = d.finite ? (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() : INFINITY;
    d.trace_defect = std::abs(rho_.trace().real() + leaked_ - 1.0);
    d.min_eigenvalue = 0.0;
    if (with_spectrum && d.finite) {
        const Eigen::MatrixXcd herm = 0.5 * (rho_ + rho_.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        d.min_eigenvalue = es.eigenvalues().minCoeff();
    }
    return d;
}

bool DensityState::is_valid(double herm_tol, double trace_tol, double eig_tol) const {
    const Diagnostics d = diagnose(true);
    return d.finite && d.hermiticity_defect <= herm_tol && d.trace_defect <= trace_tol && d.min_eigenvalue >= eig_tol;
}

Eigen::MatrixXcd thermal_mode_state(int dim, double nbar) {
    if (dim < 1 || nbar < 0) throw std::invalid_argument("thermal state needs dim >= 1 and nbar >= 0");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const double q = nbar / (1.0 + nbar);
    double norm = 0.0, w = 1.0;
    for (int k = 0; k < dim; ++k, w *= q) {
        m(k, k) = w;
        norm += w;
    }
    return m / norm;
}

cplx expectation(const DensityState& rho, const QuantumOperator& op) {
    if (rho.layout() != op.layout()) throw LayoutMismatch("expectation: layout mismatch");
    cplx acc = 0.0;
    const SparseMat& o = op.entries();
    const DenseMat& r = rho.entries();
    for (Eigen::Index i = 0; i < o.outerSize(); ++i)
        for (SparseMat::InnerIterator it(o, i); it; ++it) acc += it.value() * r(it.col(), i);
    return acc;
}

Eigen::VectorXcd spin_ket(int ion_levels, Level l1, Level l2) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ion_levels * ion_levels);
    v(static_cast<int>(l1) * ion_levels + static_cast<int>(l2)) = 1.0;
    return v;
}

Eigen::VectorXcd dark_ket(int ion_levels, double phi) {
    return (spin_ket(ion_levels, Level::up, Level::down) -
            std::polar(1.0, phi) * spin_ket(ion_levels, Level::down, Level::up)) /
           std::sqrt(2.0);
}

Eigen::VectorXcd singlet_ket(int ion_levels) { return dark_ket(ion_levels, 0.0); }

Eigen::VectorXcd triplet_ket(int ion_levels) {
    return (spin_ket(ion_levels, Level::up, Level::down) + spin_ket(ion_levels, Level::down, Level::up)) /
           std::sqrt(2.0);
}

}  // namespace spump

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <stdexcept>

#include "spump/layout.hpp"

namespace spump {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using LocalMat = Eigen::MatrixXcd;

struct LayoutMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Sparse operator on a HilbertLayout. Value type; immutable by convention.
class QuantumOperator {
public:
    explicit QuantumOperator(HilbertLayout layout);  // zero operator
    QuantumOperator(HilbertLayout layout, SparseMat entries);

    static QuantumOperator identity(const HilbertLayout& layout);

    const HilbertLayout& layout() const { return layout_; }
    const SparseMat& entries() const { return entries_; }
    std::size_t dim() const { return layout_.total_dim(); }
    std::size_t nonzeros() const { return static_cast<std::size_t>(entries_.nonZeros()); }
    bool is_zero() const { return entries_.nonZeros() == 0; }

    QuantumOperator adjoint() const;
    DenseMat dense() const { return DenseMat(entries_); }

    /// max |O - O^dagger| over entries.
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    cplx element(std::size_t row, std::size_t col) const { return entries_.coeff(row, col); }

    QuantumOperator& operator+=(const QuantumOperator& o);
    QuantumOperator& operator-=(const QuantumOperator& o);
    QuantumOperator& operator*=(cplx s);

    friend QuantumOperator operator+(QuantumOperator a, const QuantumOperator& b) { return a += b; }
    friend QuantumOperator operator-(QuantumOperator a, const QuantumOperator& b) { return a -= b; }
    friend QuantumOperator operator*(cplx s, QuantumOperator a) { return a *= s; }
    friend QuantumOperator operator*(QuantumOperator a, cplx s) { return a *= s; }
    friend QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b);

private:
    void require_same_layout(const QuantumOperator& o) const;

    HilbertLayout layout_;
    SparseMat entries_;
};

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b);

/// |row><col| on a single ion, as an ion_levels x ion_levels local matrix.
LocalMat ion_transition(const HilbertLayout& layout, Level to, Level from);

/// Local operator on ion 1 or 2, identity on the other ion and on all modes.
QuantumOperator embed_ion_operator(const HilbertLayout& layout, int ion_index, const LocalMat& local);

/// Truncated annihilation operator of mode 0 (mode 3) or 1 (mode 4).
QuantumOperator mode_lowering(const HilbertLayout& layout, int mode_index);

/// Lindblad-ready projector onto the ion-pair spin vector |psi> (length
/// ion_levels^2), identity on the modes.
QuantumOperator spin_projector(const HilbertLayout& layout, const Eigen::VectorXcd& spin_ket);

}  // namespace spump

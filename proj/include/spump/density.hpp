#pragma once

#include <Eigen/Dense>

#include "spump/operator.hpp"

namespace spump {

/// Dense density matrix on a layout.
///
/// `leaked()` carries probability that has left the represented space through
/// absorbing loss channels (the x level when it is not stored explicitly).
/// For an explicit layout it stays zero; the trace invariant is always
/// trace(rho) + leaked == 1.
class DensityState {
public:
    explicit DensityState(HilbertLayout layout);  // zero matrix
    DensityState(HilbertLayout layout, DenseMat entries, double leaked = 0.0);

    static DensityState pure(const HilbertLayout& layout, const Eigen::VectorXcd& ket);
    static DensityState basis(const HilbertLayout& layout, std::size_t flat_index);

    /// Spin density matrix (ion_levels^2 square) tensored with a mode-3 state
    /// and the mode-4 vacuum.
    static DensityState product(const HilbertLayout& layout, const Eigen::MatrixXcd& spin,
                                const Eigen::MatrixXcd& mode3);

    const HilbertLayout& layout() const { return layout_; }
    std::size_t dim() const { return layout_.total_dim(); }
    const DenseMat& entries() const { return rho_; }
    DenseMat& entries() { return rho_; }
    double leaked() const { return leaked_; }
    void set_leaked(double p) { leaked_ = p; }

    cplx trace() const { return rho_.trace(); }
    double purity() const;

    /// ion_levels^2 reduced spin density matrix (modes traced out).
    Eigen::MatrixXcd spin_reduced() const;
    /// Reduced state of mode 3 or mode 4 (mode_index 0/1).
    Eigen::MatrixXcd mode_reduced(int mode_index) const;
    double mean_occupation(int mode_index) const;

    struct Diagnostics {
        double hermiticity_defect;
        double trace_defect;  // |trace + leaked - 1|
        double min_eigenvalue;
        bool finite;
    };
    Diagnostics diagnose(bool with_spectrum = true) const;
    bool is_valid(double herm_tol = 1e-10, double trace_tol = 1e-9, double eig_tol = -1e-8) const;

private:
    HilbertLayout layout_;
    DenseMat rho_;
    double leaked_ = 0.0;
};

/// Geometric thermal state of a truncated oscillator with mean occupation nbar,
/// renormalized on the truncated space.
Eigen::MatrixXcd thermal_mode_state(int dim, double nbar);

/// Tr(rho O).
cplx expectation(const DensityState& rho, const QuantumOperator& op);

/// Spin-pair kets on an ion_levels^2 space.
Eigen::VectorXcd spin_ket(int ion_levels, Level l1, Level l2);
Eigen::VectorXcd singlet_ket(int ion_levels);
Eigen::VectorXcd triplet_ket(int ion_levels);
/// (|up,down> - e^{i phi}|down,up>)/sqrt(2)
Eigen::VectorXcd dark_ket(int ion_levels, double phi);

}  // namespace spump

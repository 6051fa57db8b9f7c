#pragma once

#include <cstdint>
#include <vector>

#include "spump/density.hpp"
#include "spump/operator.hpp"

namespace spump {

/// H(t) += coupling * exp(-i omega t) + h.c.
struct OscillatingTerm {
    QuantumOperator coupling;
    double omega;
};

/// Lindblad generator
///
///   d rho/dt = -i[H(t), rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
///              - 1/2 sum_m {K_m^+ K_m, rho}
///
/// The K_m are absorbing loss channels: their jump term lands outside the
/// stored space, and the probability they remove is accumulated in a scalar
/// "leaked" slot so trace(rho) + leaked is conserved.
///
/// The flat state layout used by apply() is the row-major n x n matrix
/// followed by one complex slot holding the leaked probability.
class LindbladGenerator {
public:
    LindbladGenerator(HilbertLayout layout, QuantumOperator hamiltonian, std::vector<OscillatingTerm> oscillating,
                      std::vector<QuantumOperator> jumps, std::vector<QuantumOperator> losses = {});

    const HilbertLayout& layout() const { return layout_; }
    std::size_t dim() const { return n_; }
    std::size_t state_size() const { return n_ * n_ + 1; }
    bool time_independent() const { return oscillating_.empty(); }
    bool trace_preserving() const { return losses_.empty(); }
    bool is_zero() const;
    /// Number of merged L rho L^+ transfer terms (cost diagnostic).
    std::size_t transfer_terms() const { return transfers_.size(); }

    const QuantumOperator& static_hamiltonian() const { return hamiltonian_; }
    const std::vector<OscillatingTerm>& oscillating_terms() const { return oscillating_; }
    const std::vector<QuantumOperator>& jump_operators() const { return jumps_; }
    const std::vector<QuantumOperator>& loss_operators() const { return losses_; }

    /// Full Hamiltonian at time t.
    QuantumOperator hamiltonian(double t) const;

    /// dy = L(t) y on the flat state (n*n + 1 entries). Reentrant.
    void apply(double t, const cplx* y, cplx* dy) const;

    DensityState derivative(double t, const DensityState& rho) const;

    /// Row-major-vectorized superoperator at time t (n^2 x n^2), leak slot
    /// excluded.
    Eigen::SparseMatrix<cplx> superoperator(double t = 0.0) const;

private:
    struct Entry {
        int row, col;
        cplx value;
    };
    static std::vector<Entry> entries_of(const SparseMat& m);

    HilbertLayout layout_;
    std::size_t n_;
    QuantumOperator hamiltonian_;
    std::vector<OscillatingTerm> oscillating_;
    std::vector<QuantumOperator> jumps_;
    std::vector<QuantumOperator> losses_;

    SparseMat minus_i_heff_;                         // -i (H - i/2 sum L^+L - i/2 sum K^+K)
    std::vector<std::vector<Entry>> osc_forward_;    // coupling entries
    std::vector<std::vector<Entry>> osc_backward_;   // coupling^dagger entries
    std::vector<std::vector<Entry>> jump_entries_;
    // sum_k L_k rho L_k^+ as merged dy[dst] += coef * y[src] terms
    struct Transfer {
        std::uint32_t dst, src;
        double re, im;
    };
    std::vector<Transfer> transfers_;
    std::vector<Entry> loss_rate_;                   // sum K^+K
};

}  // namespace spump

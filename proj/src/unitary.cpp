#include <Eigen/Eigenvalues>

#include "spump/dynamics.hpp"

namespace spump {

Eigen::MatrixXcd unitary_propagator(const QuantumOperator& h, double duration) {
    if (!h.is_hermitian(1e-9 * std::max(1.0, h.entries().cwiseAbs().sum())))
        throw std::invalid_argument("propagate_unitary: hamiltonian is not Hermitian");
    const Eigen::MatrixXcd hd = Eigen::MatrixXcd(h.dense());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hd);
    if (es.info() != Eigen::Success) throw std::runtime_error("propagate_unitary: eigendecomposition failed");
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<cplx>() * cplx(0.0, -duration)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DensityState apply_unitary(const DensityState& rho, const Eigen::MatrixXcd& u) {
    if (u.rows() != static_cast<Eigen::Index>(rho.dim())) throw LayoutMismatch("unitary dimension mismatch");
    DenseMat out = u * rho.entries() * u.adjoint();
    return DensityState(rho.layout(), std::move(out), rho.leaked());
}

DensityState propagate_unitary(const DensityState& rho, const QuantumOperator& h, double duration) {
    if (rho.layout() != h.layout()) throw LayoutMismatch("propagate_unitary: layout mismatch");
    return apply_unitary(rho, unitary_propagator(h, duration));
}

}  // namespace spump

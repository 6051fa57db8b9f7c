#include "spump/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace spump::kernels::scalar {
namespace {

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const double ar = a.real(), ai = a.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cplx(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
    }
}

void lincomb(std::size_t n, const cplx* base, std::size_t nterms, const double* coef,
             const cplx* const* terms, cplx* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double re = base[i].real(), im = base[i].imag();
        for (std::size_t k = 0; k < nterms; ++k) {
            re += coef[k] * terms[k][i].real();
            im += coef[k] * terms[k][i].imag();
        }
        out[i] = cplx(re, im);
    }
}

void hermitian_sum(std::size_t n, const cplx* y, cplx* out) {
    constexpr std::size_t tile = 16;
    for (std::size_t ib = 0; ib < n; ib += tile) {
        const std::size_t ie = std::min(n, ib + tile);
        for (std::size_t jb = 0; jb < n; jb += tile) {
            const std::size_t je = std::min(n, jb + tile);
            for (std::size_t i = ib; i < ie; ++i)
                for (std::size_t j = jb; j < je; ++j)
                    out[i * n + j] = y[i * n + j] + std::conj(y[j * n + i]);
        }
    }
}

double weighted_sq_norm(std::size_t n, const cplx* err, const cplx* a, const cplx* b,
                        double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        acc += std::norm(err[i]) / (scale * scale);
    }
    return acc;
}

}  // namespace

const KernelTable table{Isa::scalar, "scalar", axpy, lincomb, hermitian_sum, weighted_sq_norm};

}  // namespace spump::kernels::scalar

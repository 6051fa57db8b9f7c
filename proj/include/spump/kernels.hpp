#pragma once

// Data-parallel complex kernels used by the master-equation right-hand side
// and the Runge-Kutta stage arithmetic. Every kernel has a scalar reference
// implementation; an AVX2/FMA variant is selected at runtime when the CPU
// supports it. Both variants must agree to rounding (see tests/test_kernels).

#include <complex>
#include <cstddef>
#include <string_view>

namespace spump::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    /// y[i] += a * x[i]
    void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);

    /// out[i] = base[i] + sum_k coef[k] * terms[k][i]   (real coefficients)
    void (*lincomb)(std::size_t n, const cplx* base, std::size_t nterms,
                    const double* coef, const cplx* const* terms, cplx* out);

    /// out = Y + Y^dagger for a row-major n x n block.
    void (*hermitian_sum)(std::size_t n, const cplx* y, cplx* out);

    /// sum_i |err[i]|^2 / (atol + rtol * max(|a[i]|, |b[i]|))^2
    double (*weighted_sq_norm)(std::size_t n, const cplx* err, const cplx* a,
                               const cplx* b, double atol, double rtol);
};

/// Kernel table for the active instruction set.
const KernelTable& active();

/// Table for a specific ISA; falls back to scalar if the ISA is unavailable.
const KernelTable& table(Isa isa);

bool isa_available(Isa isa);

/// Forces the dispatcher onto one ISA (tests and benchmarking). Returns the
/// previously active ISA.
Isa force_isa(Isa isa);

std::string_view isa_name(Isa isa);

namespace scalar {
extern const KernelTable table;
}
#if defined(SPUMP_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

}  // namespace spump::kernels

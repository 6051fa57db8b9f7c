#include "spump/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// Complex doubles are stored interleaved (re, im); one __m256d holds two of them.

namespace spump::kernels::avx2 {
namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// (ar + i ai) * (x0, x1) for packed complex x
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
    const __m256d xs = _mm256_permute_pd(x, 0b0101);  // (im, re) pairs
    return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    const double* xd = dp(x);
    double* yd = dp(y);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
        __m256d x1 = _mm256_loadu_pd(xd + 2 * i + 4);
        __m256d y0 = _mm256_loadu_pd(yd + 2 * i);
        __m256d y1 = _mm256_loadu_pd(yd + 2 * i + 4);
        y0 = _mm256_add_pd(y0, cmul(ar, ai, x0));
        y1 = _mm256_add_pd(y1, cmul(ar, ai, x1));
        _mm256_storeu_pd(yd + 2 * i, y0);
        _mm256_storeu_pd(yd + 2 * i + 4, y1);
    }
    for (; i + 2 <= n; i += 2) {
        __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
        __m256d y0 = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(y0, cmul(ar, ai, x0)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void lincomb(std::size_t n, const cplx* base, std::size_t nterms, const double* coef,
             const cplx* const* terms, cplx* out) {
    // Treat the complex arrays as 2n real lanes; coefficients are real.
    const std::size_t m = 2 * n;
    const double* bd = dp(base);
    double* od = dp(out);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d acc = _mm256_loadu_pd(bd + i);
        for (std::size_t k = 0; k < nterms; ++k)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[k]), _mm256_loadu_pd(dp(terms[k]) + i), acc);
        _mm256_storeu_pd(od + i, acc);
    }
    for (; i < m; ++i) {
        double acc = bd[i];
        for (std::size_t k = 0; k < nterms; ++k) acc += coef[k] * dp(terms[k])[i];
        od[i] = acc;
    }
}

void hermitian_sum(std::size_t n, const cplx* y, cplx* out) {
    const double* yd = dp(y);
    double* od = dp(out);
    const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    const std::size_t even = n & ~std::size_t{1};
    // 2x2 complex tiles: out[i..i+1][j..j+1] = y[i..i+1][j..j+1] + conj(y[j..j+1][i..i+1])^T
    for (std::size_t i = 0; i < even; i += 2) {
        for (std::size_t j = 0; j < even; j += 2) {
            const __m256d a0 = _mm256_loadu_pd(yd + 2 * (i * n + j));
            const __m256d a1 = _mm256_loadu_pd(yd + 2 * ((i + 1) * n + j));
            const __m256d t0 = _mm256_loadu_pd(yd + 2 * (j * n + i));        // y[j][i], y[j][i+1]
            const __m256d t1 = _mm256_loadu_pd(yd + 2 * ((j + 1) * n + i));  // y[j+1][i], y[j+1][i+1]
            const __m256d c0 = _mm256_xor_pd(_mm256_permute2f128_pd(t0, t1, 0x20), conj_mask);
            const __m256d c1 = _mm256_xor_pd(_mm256_permute2f128_pd(t0, t1, 0x31), conj_mask);
            _mm256_storeu_pd(od + 2 * (i * n + j), _mm256_add_pd(a0, c0));
            _mm256_storeu_pd(od + 2 * ((i + 1) * n + j), _mm256_add_pd(a1, c1));
        }
    }
    if (even != n) {
        const std::size_t k = n - 1;
        for (std::size_t j = 0; j < n; ++j) {
            out[k * n + j] = y[k * n + j] + std::conj(y[j * n + k]);
            out[j * n + k] = y[j * n + k] + std::conj(y[k * n + j]);
        }
    }
}

double weighted_sq_norm(std::size_t n, const cplx* err, const cplx* a, const cplx* b,
                        double atol, double rtol) {
    const double* ed = dp(err);
    const double* ad = dp(a);
    const double* bd = dp(b);
    const __m256d va = _mm256_set1_pd(atol);
    const __m256d vr = _mm256_set1_pd(rtol);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d e = _mm256_loadu_pd(ed + 2 * i);
        const __m256d x = _mm256_loadu_pd(ad + 2 * i);
        const __m256d y = _mm256_loadu_pd(bd + 2 * i);
        // |z|^2 summed within each complex pair via hadd: (e0r^2+e0i^2, same, e1.., same)
        const __m256d e2 = _mm256_mul_pd(e, e);
        const __m256d x2 = _mm256_mul_pd(x, x);
        const __m256d y2 = _mm256_mul_pd(y, y);
        const __m256d en = _mm256_hadd_pd(e2, e2);
        const __m256d xn = _mm256_sqrt_pd(_mm256_hadd_pd(x2, x2));
        const __m256d yn = _mm256_sqrt_pd(_mm256_hadd_pd(y2, y2));
        const __m256d scale = _mm256_fmadd_pd(vr, _mm256_max_pd(xn, yn), va);
        // hadd duplicates each pair's value into both lanes; halve to count once.
        acc = _mm256_add_pd(acc, _mm256_div_pd(en, _mm256_mul_pd(scale, scale)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = 0.5 * (lanes[0] + lanes[1] + lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        total += std::norm(err[i]) / (scale * scale);
    }
    return total;
}

}  // namespace

const KernelTable table{Isa::avx2, "avx2", axpy, lincomb, hermitian_sum, weighted_sq_norm};

}  // namespace spump::kernels::avx2

#include <doctest.h>

#include <random>
#include <vector>

#include "spump/kernels.hpp"

using namespace spump::kernels;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {d(rng), d(rng)};
    return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Lengths straddle the vector width and the unroll factor.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 135, 1000};

}  // namespace

TEST_SUITE("kernels") {
TEST_CASE("scalar table is always available and named") {
    CHECK(isa_available(Isa::scalar));
    CHECK(table(Isa::scalar).isa == Isa::scalar);
    CHECK(isa_name(Isa::scalar) == "scalar");
}

TEST_CASE("force_isa switches the active table and restores") {
    const Isa before = active().isa;
    const Isa prev = force_isa(Isa::scalar);
    CHECK(prev == before);
    CHECK(active().isa == Isa::scalar);
    force_isa(before);
    CHECK(active().isa == before);
}

TEST_CASE("avx2 kernels match the scalar reference") {
    if (!isa_available(Isa::avx2)) {
        MESSAGE("avx2 unavailable on this CPU; equivalence not exercised");
        return;
    }
    const KernelTable& s = table(Isa::scalar);
    const KernelTable& v = table(Isa::avx2);
    REQUIRE(v.isa == Isa::avx2);
    std::mt19937_64 rng(7);
    for (std::size_t n : kLengths) {
        CAPTURE(n);
        const auto x = random_vec(n, rng), y0 = random_vec(n, rng);
        const cplx a(0.3, -1.7);

        auto ys = y0, yv = y0;
        s.axpy(n, a, x.data(), ys.data());
        v.axpy(n, a, x.data(), yv.data());
        CHECK(max_diff(ys, yv) <= 1e-14);

        const auto t1 = random_vec(n, rng), t2 = random_vec(n, rng), t3 = random_vec(n, rng);
        const cplx* terms[] = {t1.data(), t2.data(), t3.data()};
        const double coef[] = {0.25, -1.5, 3e-3};
        std::vector<cplx> os(n), ov(n);
        s.lincomb(n, x.data(), 3, coef, terms, os.data());
        v.lincomb(n, x.data(), 3, coef, terms, ov.data());
        CHECK(max_diff(os, ov) <= 1e-14);

        const double as = s.weighted_sq_norm(n, t1.data(), t2.data(), t3.data(), 1e-10, 1e-8);
        const double av = v.weighted_sq_norm(n, t1.data(), t2.data(), t3.data(), 1e-10, 1e-8);
        CHECK(std::abs(as - av) <= 1e-12 * std::max(1.0, std::abs(as)));
    }
    for (std::size_t n : {1, 2, 3, 5, 8, 9, 16, 27, 135}) {
        CAPTURE(n);
        const auto y = random_vec(n * n, rng);
        std::vector<cplx> os(n * n), ov(n * n);
        s.hermitian_sum(n, y.data(), os.data());
        v.hermitian_sum(n, y.data(), ov.data());
        CHECK(max_diff(os, ov) == 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(os[i * n + j] == std::conj(os[j * n + i]));
    }
}

TEST_CASE("scalar reference kernels compute their definitions") {
    const KernelTable& s = table(Isa::scalar);
    std::vector<cplx> x{{1, 2}, {3, -1}}, y{{0, 1}, {2, 2}};
    s.axpy(2, cplx(0, 1), x.data(), y.data());
    CHECK(y[0] == cplx(-2, 2));
    CHECK(y[1] == cplx(3, 5));
    const cplx* terms[] = {x.data()};
    const double c[] = {2.0};
    std::vector<cplx> out(2);
    s.lincomb(2, y.data(), 1, c, terms, out.data());
    CHECK(out[0] == cplx(0, 6));
    const std::vector<cplx> err{{3, 4}}, a{{1, 0}}, b{{0, 0}};
    CHECK(s.weighted_sq_norm(1, err.data(), a.data(), b.data(), 0.0, 1.0) == doctest::Approx(25.0));
}
}

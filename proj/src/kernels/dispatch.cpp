#include "spump/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace spump::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SPUMP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() {
    // SPUMP_ISA=scalar pins the reference kernels.
    if (const char* env = std::getenv("SPUMP_ISA"); env && std::strcmp(env, "scalar") == 0)
        return Isa::scalar;
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

const KernelTable& table(Isa isa) {
#if defined(SPUMP_HAVE_AVX2)
    if (isa == Isa::avx2 && cpu_has_avx2()) return avx2::table;
#endif
    (void)isa;
    return scalar::table;
}

const KernelTable& active() { return table(current().load(std::memory_order_relaxed)); }

Isa force_isa(Isa isa) {
    if (!isa_available(isa)) isa = Isa::scalar;
    return current().exchange(isa);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace spump::kernels

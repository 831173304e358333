#include <atomic>

#include "mdiqkd/errors.hpp"
#include "mdiqkd/simd.hpp"

namespace mdiqkd::simd {

namespace {

constexpr KernelSet kScalar{detail::pattern_sum_scalar, detail::dot_scalar};
#if defined(MDIQKD_HAVE_AVX2)
constexpr KernelSet kAvx2{detail::pattern_sum_avx2, detail::dot_avx2};
#endif

bool cpu_has_avx2() {
#if defined(MDIQKD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<Isa>& selection() {
    static std::atomic<Isa> isa{best_available()};
    return isa;
}

} // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool available(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Isa best_available() { return available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelSet& kernels(Isa isa) {
    if (!available(isa)) throw PreconditionError("instruction set " + std::string(to_string(isa)) + " not available");
#if defined(MDIQKD_HAVE_AVX2)
    if (isa == Isa::avx2) return kAvx2;
#endif
    return kScalar;
}

Isa active() { return selection().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
    if (!available(isa)) throw PreconditionError("instruction set " + std::string(to_string(isa)) + " not available");
    selection().store(isa, std::memory_order_relaxed);
}

} // namespace mdiqkd::simd

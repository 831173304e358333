#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// vectorized variants picked at runtime. Every variant must agree with the
// scalar one to rounding (see tests/test_kernels.cpp).

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mdiqkd::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Four-mode photon-number configurations in structure-of-arrays layout,
/// with the probability of each configuration.
struct ConfigView {
    std::span<const std::int32_t> n1h, n1v, n2h, n2v;
    std::span<const double> probability;

    std::size_t size() const { return probability.size(); }
};

/// Per-photon-count detector response: click[n] = P(click | n photons),
/// silent[n] = 1 - click[n], both indexed 0..max photon count.
struct ClickTable {
    std::span<const double> click;
    std::span<const double> silent;
};

enum class Pattern { same_arm, cross_arm };

struct KernelSet {
    // sum_k probability[k] * pattern(click/silent at the four mode counts of k)
    double (*pattern_sum)(const ConfigView& configs, const ClickTable& table, Pattern pattern);
    // compensated sum_k a[k] * b[k]
    double (*dot)(std::span<const double> a, std::span<const double> b);
};

bool available(Isa isa);
Isa best_available();

const KernelSet& kernels(Isa isa);

// Process-wide selection; defaults to best_available(). Throws
// PreconditionError when the requested ISA is not supported here.
Isa active();
void set_active(Isa isa);
inline const KernelSet& active_kernels() { return kernels(active()); }

namespace detail {
double pattern_sum_scalar(const ConfigView& configs, const ClickTable& table, Pattern pattern);
double dot_scalar(std::span<const double> a, std::span<const double> b);
#if defined(MDIQKD_HAVE_AVX2)
double pattern_sum_avx2(const ConfigView& configs, const ClickTable& table, Pattern pattern);
double dot_avx2(std::span<const double> a, std::span<const double> b);
#endif
} // namespace detail

} // namespace mdiqkd::simd

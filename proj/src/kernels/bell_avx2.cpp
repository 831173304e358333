#include <immintrin.h>

#include "mdiqkd/simd.hpp"
#include "neumaier.hpp"

namespace mdiqkd::simd::detail {

namespace {

// Lane-wise Neumaier accumulator.
struct CompensatedSum4 {
    __m256d sum = _mm256_setzero_pd();
    __m256d carry = _mm256_setzero_pd();

    void add(__m256d x) {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        const __m256d t = _mm256_add_pd(sum, x);
        const __m256d sum_larger =
            _mm256_cmp_pd(_mm256_and_pd(sum, abs_mask), _mm256_and_pd(x, abs_mask), _CMP_GE_OQ);
        const __m256d if_sum = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
        const __m256d if_x = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
        carry = _mm256_add_pd(carry, _mm256_blendv_pd(if_x, if_sum, sum_larger));
        sum = t;
    }

    void drain_into(CompensatedSum& acc) const {
        alignas(32) double s[4], c[4];
        _mm256_store_pd(s, sum);
        _mm256_store_pd(c, carry);
        for (int lane = 0; lane < 4; ++lane) acc.add(s[lane]);
        for (int lane = 0; lane < 4; ++lane) acc.add(c[lane]);
    }
};

inline __m128i load4(const std::int32_t* p) { return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p)); }

inline __m256d gather(const double* table, __m128i index) { return _mm256_i32gather_pd(table, index, 8); }

} // namespace

double pattern_sum_avx2(const ConfigView& configs, const ClickTable& table, Pattern pattern) {
    const double* c = table.click.data();
    const double* s = table.silent.data();
    const std::size_t n = configs.size();
    const std::size_t vec_end = n - n % 4;

    CompensatedSum4 lanes;
    for (std::size_t k = 0; k < vec_end; k += 4) {
        const __m128i a = load4(configs.n1h.data() + k);
        const __m128i b = load4(configs.n1v.data() + k);
        const __m128i x = load4(configs.n2h.data() + k);
        const __m128i y = load4(configs.n2v.data() + k);
        const __m256d ca = gather(c, a), cb = gather(c, b), cx = gather(c, x), cy = gather(c, y);
        const __m256d sa = gather(s, a), sb = gather(s, b), sx = gather(s, x), sy = gather(s, y);
        __m256d first, second;
        if (pattern == Pattern::same_arm) {
            first = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(ca, cb), sx), sy);
            second = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(cx, cy), sa), sb);
        } else {
            first = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(ca, cy), sb), sx);
            second = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(cb, cx), sa), sy);
        }
        const __m256d p = _mm256_loadu_pd(configs.probability.data() + k);
        lanes.add(_mm256_mul_pd(p, _mm256_add_pd(first, second)));
    }

    CompensatedSum acc;
    lanes.drain_into(acc);
    if (vec_end < n) {
        ConfigView rest{configs.n1h.subspan(vec_end), configs.n1v.subspan(vec_end), configs.n2h.subspan(vec_end),
                        configs.n2v.subspan(vec_end), configs.probability.subspan(vec_end)};
        acc.add(pattern_sum_scalar(rest, table, pattern));
    }
    return acc.value();
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t vec_end = n - n % 4;
    CompensatedSum4 lanes;
    for (std::size_t k = 0; k < vec_end; k += 4)
        lanes.add(_mm256_mul_pd(_mm256_loadu_pd(a.data() + k), _mm256_loadu_pd(b.data() + k)));
    CompensatedSum acc;
    lanes.drain_into(acc);
    for (std::size_t k = vec_end; k < n; ++k) acc.add(a[k] * b[k]);
    return acc.value();
}

} // namespace mdiqkd::simd::detail

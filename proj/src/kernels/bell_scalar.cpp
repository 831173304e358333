#include "mdiqkd/simd.hpp"
#include "neumaier.hpp"

namespace mdiqkd::simd::detail {

double pattern_sum_scalar(const ConfigView& configs, const ClickTable& table, Pattern pattern) {
    const double* c = table.click.data();
    const double* s = table.silent.data();
    CompensatedSum acc;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const auto a = configs.n1h[k], b = configs.n1v[k], x = configs.n2h[k], y = configs.n2v[k];
        double fire;
        if (pattern == Pattern::same_arm)
            fire = c[a] * c[b] * s[x] * s[y] + c[x] * c[y] * s[a] * s[b];
        else
            fire = c[a] * c[y] * s[b] * s[x] + c[b] * c[x] * s[a] * s[y];
        acc.add(configs.probability[k] * fire);
    }
    return acc.value();
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < a.size(); ++k) acc.add(a[k] * b[k]);
    return acc.value();
}

} // namespace mdiqkd::simd::detail

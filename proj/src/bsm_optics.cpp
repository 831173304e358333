#include "mdiqkd/bsm_optics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdiqkd/errors.hpp"
#include "parallel.hpp"

namespace mdiqkd {

namespace {

__extension__ using Int = __int128;

constexpr int kSide = kMaxTotalPhotons + 1;

struct Combinatorics {
    long long binomial[kSide][kSide]{};
    long double factorial[kSide]{};
    // splitter[s][t][p]: coefficient of c1^p c2^(s+t-p) in (c1 + c2)^s (c1 - c2)^t,
    // filled for s + t <= kMaxTotalPhotons.
    std::vector<long long> splitter;

    long long split(int s, int t, int p) const {
        return splitter[(static_cast<std::size_t>(s) * kSide + static_cast<std::size_t>(t)) * kSide +
                        static_cast<std::size_t>(p)];
    }

    Combinatorics() : splitter(static_cast<std::size_t>(kSide) * kSide * kSide, 0) {
        for (int n = 0; n < kSide; ++n) {
            binomial[n][0] = 1;
            for (int k = 1; k <= n; ++k) binomial[n][k] = binomial[n - 1][k - 1] + (k < n ? binomial[n - 1][k] : 0);
        }
        factorial[0] = 1.0L;
        for (int n = 1; n < kSide; ++n) factorial[n] = factorial[n - 1] * n;
        for (int s = 0; s < kSide; ++s) {
            for (int t = 0; s + t < kSide; ++t) {
                for (int p = 0; p <= s + t; ++p) {
                    long long c = 0;
                    for (int k = std::max(0, p - s); k <= std::min(t, p); ++k) {
                        const long long term = binomial[s][p - k] * binomial[t][k];
                        c += ((t - k) % 2 == 0) ? term : -term;
                    }
                    splitter[(static_cast<std::size_t>(s) * kSide + static_cast<std::size_t>(t)) * kSide +
                             static_cast<std::size_t>(p)] = c;
                }
            }
        }
    }
};

const Combinatorics& combinatorics() {
    static const Combinatorics tables;
    return tables;
}

// Expansion of n photons with polarization `pol` into H/V creation operators:
// weight[s] multiplies a_H^s a_V^(n-s), with an overall 2^(-scale/2).
struct PolarizationExpansion {
    std::vector<long long> weight;
    int scale = 0;
};

PolarizationExpansion expand(int n, Polarization pol) {
    const auto& comb = combinatorics();
    PolarizationExpansion e;
    e.weight.assign(static_cast<std::size_t>(n) + 1, 0);
    switch (pol) {
    case Polarization::H: e.weight[n] = 1; break;
    case Polarization::V: e.weight[0] = 1; break;
    case Polarization::Plus:
    case Polarization::Minus:
        e.scale = n;
        for (int s = 0; s <= n; ++s) {
            const bool negative = pol == Polarization::Minus && (n - s) % 2 == 1;
            e.weight[s] = negative ? -comb.binomial[n][s] : comb.binomial[n][s];
        }
        break;
    }
    return e;
}

long long signed_binomial_term(const Combinatorics& comb, int s, int t, int p, int k) {
    const long long term = comb.binomial[s][p - k] * comb.binomial[t][k];
    return ((t - k) % 2 == 0) ? term : -term;
}

} // namespace

class OutputBuilder {
public:
    static OutputDistribution run(int i, Polarization pol_a, int j, Polarization pol_b, Summation summation) {
        if (i < 0 || j < 0) throw DomainError("photon numbers must be non-negative");
        if (i + j > kMaxTotalPhotons)
            throw PreconditionError("propagation limited to " + std::to_string(kMaxTotalPhotons) + " photons in total");

        const auto& comb = combinatorics();
        const PolarizationExpansion ea = expand(i, pol_a);
        const PolarizationExpansion eb = expand(j, pol_b);
        const int total = i + j;
        // |coefficient|^2 = S^2 * 2^-(total + scales); amplitude adds sqrt(prod n!) / sqrt(i! j!)
        const int halvings = total + ea.scale + eb.scale;
        const long double input_norm = comb.factorial[i] * comb.factorial[j];

        OutputDistribution out;
        out.total_photons_ = total;

        for (int n1h = 0; n1h <= total; ++n1h) {
            for (int n1v = 0; n1v + n1h <= total; ++n1v) {
                for (int n2h = 0; n2h + n1v + n1h <= total; ++n2h) {
                    const int n2v = total - n1h - n1v - n2h;
                    const int h = n1h + n2h;
                    const int s_lo = std::max(0, h - j), s_hi = std::min(i, h);
                    if (s_lo > s_hi) continue;

                    long double weight2 = 0.0L;  // S^2, or the literal sum of squares
                    if (summation == Summation::coherent) {
                        Int sum = 0;
                        for (int s = s_lo; s <= s_hi; ++s) {
                            const int t = h - s;
                            const long long wa = ea.weight[s], wb = eb.weight[t];
                            if (wa == 0 || wb == 0) continue;
                            sum += static_cast<Int>(wa * wb) * comb.split(s, t, n1h) * comb.split(i - s, j - t, n1v);
                        }
                        if (sum == 0) continue;
                        const long double s_value = static_cast<long double>(sum);
                        weight2 = s_value * s_value;
                    } else {
                        for (int s = s_lo; s <= s_hi; ++s) {
                            const int t = h - s;
                            const long double w = static_cast<long double>(ea.weight[s]) * eb.weight[t];
                            if (w == 0.0L) continue;
                            const int u = i - s, v = j - t;
                            for (int kh = std::max(0, n1h - s); kh <= std::min(t, n1h); ++kh) {
                                const long double th = signed_binomial_term(comb, s, t, n1h, kh);
                                for (int kv = std::max(0, n1v - u); kv <= std::min(v, n1v); ++kv) {
                                    const long double term = w * th * signed_binomial_term(comb, u, v, n1v, kv);
                                    weight2 += term * term;
                                }
                            }
                        }
                        if (weight2 == 0.0L) continue;
                    }

                    const long double modes =
                        comb.factorial[n1h] * comb.factorial[n1v] * comb.factorial[n2h] * comb.factorial[n2v];
                    const long double prob = std::ldexp(weight2 * modes / input_norm, -halvings);
                    out.n1h_.push_back(n1h);
                    out.n1v_.push_back(n1v);
                    out.n2h_.push_back(n2h);
                    out.n2v_.push_back(n2v);
                    out.probability_.push_back(static_cast<double>(prob));
                }
            }
        }
        return out;
    }
};

double OutputDistribution::probability(const FockConfig& config) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const FockConfig here = this->config(mid);
        if (here == config) return probability_[mid];
        if (here < config)
            lo = mid + 1;
        else
            hi = mid;
    }
    return 0.0;
}

double OutputDistribution::total_probability() const {
    std::vector<double> ones(size(), 1.0);
    return simd::kernels(simd::Isa::scalar).dot(probability_, ones);
}

OutputDistribution propagate(int i, Polarization pol_a, int j, Polarization pol_b, Summation summation) {
    return OutputBuilder::run(i, pol_a, j, pol_b, summation);
}

void DetectorParams::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw DomainError("detector efficiency must lie in [0, 1]");
    if (!(dark_count >= 0.0 && dark_count < 1.0)) throw DomainError("dark count must lie in [0, 1)");
}

namespace {

double silent_probability(int photon_count, const DetectorParams& params) {
    if (photon_count == 0) return 1.0 - params.dark_count;
    if (params.efficiency == 1.0) return 0.0;
    return std::exp(std::log1p(-params.dark_count) + photon_count * std::log1p(-params.efficiency));
}

struct ClickColumns {
    std::vector<double> click, silent;

    explicit ClickColumns(const DetectorParams& params) : click(kSide), silent(kSide) {
        for (int n = 0; n < kSide; ++n) {
            click[n] = click_probability(n, params);
            silent[n] = silent_probability(n, params);
        }
    }

    simd::ClickTable table() const { return {click, silent}; }
};

simd::Pattern pattern_of(BellOutcome outcome) {
    return outcome == BellOutcome::psi_plus ? simd::Pattern::same_arm : simd::Pattern::cross_arm;
}

} // namespace

double click_probability(int photon_count, const DetectorParams& params) {
    if (photon_count < 0) throw DomainError("photon count must be non-negative");
    if (photon_count == 0) return params.dark_count;
    if (params.efficiency == 1.0) return 1.0;
    return -std::expm1(std::log1p(-params.dark_count) + photon_count * std::log1p(-params.efficiency));
}

double bell_yield(const OutputDistribution& dist, BellOutcome outcome, const DetectorParams& params) {
    params.validate();
    const ClickColumns columns(params);
    return simd::active_kernels().pattern_sum(dist.view(), columns.table(), pattern_of(outcome));
}

namespace {

constexpr std::pair<Polarization, Polarization> kCanonicalPairs[] = {
    {Polarization::H, Polarization::V},
    {Polarization::H, Polarization::H},
    {Polarization::Plus, Polarization::Plus},
    {Polarization::Plus, Polarization::Minus},
};

} // namespace

PropagationCache::PropagationCache(int cutoff, unsigned threads) : cutoff_(cutoff) {
    if (cutoff < 1) throw DomainError("yield table cutoff must be at least 1");
    if (cutoff > kMaxPhotonsPerSide)
        throw PreconditionError("yield table cutoff " + std::to_string(cutoff) + " exceeds the precision budget of " +
                                std::to_string(kMaxPhotonsPerSide) + " photons per side");
    const std::size_t side = static_cast<std::size_t>(cutoff) + 1;
    entries_.resize(4 * side * side);
    detail::parallel_for(entries_.size(), threads, [&](std::size_t k) {
        const std::size_t pair = k / (side * side);
        const int i = static_cast<int>((k / side) % side);
        const int j = static_cast<int>(k % side);
        entries_[k] = propagate(i, kCanonicalPairs[pair].first, j, kCanonicalPairs[pair].second);
    });
}

const OutputDistribution& PropagationCache::get(int pair, int i, int j) const {
    const std::size_t side = static_cast<std::size_t>(cutoff_) + 1;
    return entries_[(static_cast<std::size_t>(pair) * side + static_cast<std::size_t>(i)) * side +
                    static_cast<std::size_t>(j)];
}

YieldTable yield_tables(const PropagationCache& cache, const DetectorParams& params) {
    params.validate();
    const ClickColumns columns(params);
    const auto table = columns.table();
    const auto& kernels = simd::active_kernels();
    YieldTable yields(cache.cutoff());
    // Only psi+ is evaluated: the psi- and swapped-order contributions equal it
    // by symmetry, and the 1/4 input-pair probability cancels the factor 4.
    constexpr struct {
        int pair;
        Basis basis;
        Role role;
    } kSlots[] = {{0, Basis::Z, Role::correct}, {1, Basis::Z, Role::error}, {2, Basis::X, Role::correct},
                  {3, Basis::X, Role::error}};
    for (const auto& slot : kSlots) {
        for (int i = 0; i <= cache.cutoff(); ++i) {
            for (int j = 0; j <= cache.cutoff(); ++j) {
                const double y = kernels.pattern_sum(cache.get(slot.pair, i, j).view(), table, simd::Pattern::same_arm);
                yields.set(slot.basis, slot.role, i, j, y);
            }
        }
    }
    return yields;
}

YieldTable yield_tables(const DetectorParams& params, int cutoff) {
    return yield_tables(PropagationCache(cutoff), params);
}

} // namespace mdiqkd

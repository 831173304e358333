#include "mdiqkd/source_models.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mdiqkd/errors.hpp"

namespace mdiqkd {

namespace {

// Terms past this index are below 1e-300 for every intensity that can meet
// kMaxDistributionCutoff, so the suffix sums below are the full analytic tail.
constexpr int kScanLength = 200;

struct Weights {
    double log_odd;  // -inf when the odd sector is absent
    double log_even;
};

Weights family_weights(const SourceSpec& spec) {
    constexpr double none = -std::numeric_limits<double>::infinity();
    const double mu = spec.intensity;
    switch (spec.kind) {
    case SourceKind::wcs:
        return {-mu, -mu};
    case SourceKind::css:
    case SourceKind::nonideal_css: {
        const double a = spec.kind == SourceKind::css ? 1.0 : spec.odd_weight;
        return {a > 0.0 ? std::log(a) - std::log(std::sinh(mu)) : none,
                a < 1.0 ? std::log1p(-a) - std::log(std::cosh(mu)) : none};
    }
    default:
        return {none, none};
    }
}

} // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::css: return "css";
    case SourceKind::nonideal_css: return "nonideal_css";
    case SourceKind::wcs: return "wcs";
    case SourceKind::sps: return "sps";
    case SourceKind::vacuum: return "vacuum";
    }
    return "unknown";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
    for (auto kind : {SourceKind::css, SourceKind::nonideal_css, SourceKind::wcs, SourceKind::sps, SourceKind::vacuum}) {
        if (text == to_string(kind)) return kind;
    }
    return std::nullopt;
}

void SourceSpec::validate() const {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw DomainError("source intensity must be a finite non-negative number, got " + std::to_string(intensity));
    if (!(odd_weight >= 0.0 && odd_weight <= 1.0))
        throw DomainError("odd_weight must lie in [0, 1], got " + std::to_string(odd_weight));
    if (kind == SourceKind::css && odd_weight != 1.0)
        throw DomainError("an ideal css source has odd_weight = 1");
}

PhotonDistribution PhotonDistribution::from_probabilities(std::vector<double> probabilities, double tail_mass) {
    if (probabilities.empty()) throw DomainError("distribution needs at least p_0");
    double total = tail_mass;
    for (double p : probabilities) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("photon-number probability outside [0, 1]");
        total += p;
    }
    if (!(tail_mass >= 0.0) || total > 1.0 + 1e-12) throw DomainError("photon-number probabilities exceed unit mass");
    PhotonDistribution dist;
    dist.probabilities_ = std::move(probabilities);
    dist.tail_mass_ = tail_mass;
    return dist;
}

double PhotonDistribution::retained_mass() const {
    return std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
}

double PhotonDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < probabilities_.size(); ++n) m += static_cast<double>(n) * probabilities_[n];
    return m;
}

PhotonDistribution build_distribution(const SourceSpec& spec, double tail_tolerance) {
    spec.validate();
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-6))
        throw DomainError("tail tolerance must lie in (0, 1e-6]");

    PhotonDistribution dist;
    const double mu = spec.intensity;
    const double a = spec.kind == SourceKind::css ? 1.0 : spec.odd_weight;

    switch (spec.kind) {
    case SourceKind::vacuum:
        dist.probabilities_ = {1.0};
        return dist;
    case SourceKind::sps:
        dist.probabilities_ = {0.0, 1.0};
        return dist;
    case SourceKind::wcs:
        if (mu == 0.0) {
            dist.probabilities_ = {1.0};
            return dist;
        }
        break;
    case SourceKind::css:
    case SourceKind::nonideal_css:
        if (mu == 0.0) {
            // sinh(mu) -> mu, cosh(mu) -> 1: only n = 0 and n = 1 survive
            dist.probabilities_ = {1.0 - a, a};
            return dist;
        }
        break;
    }

    const Weights w = family_weights(spec);
    const double log_mu = std::log(mu);
    std::vector<double> terms(kScanLength);
    for (int n = 0; n < kScanLength; ++n) {
        const double log_weight = (n % 2 == 1) ? w.log_odd : w.log_even;
        terms[n] = std::isinf(log_weight)
                       ? 0.0
                       : std::exp(log_weight + n * log_mu - std::lgamma(static_cast<double>(n) + 1.0));
    }

    // suffix[n] = sum of terms[k] for k >= n, accumulated smallest first
    std::vector<double> suffix(kScanLength + 1, 0.0);
    for (int n = kScanLength - 1; n >= 0; --n) suffix[n] = suffix[n + 1] + terms[n];

    int cutoff = 0;
    while (suffix[cutoff + 1] >= tail_tolerance) {
        if (++cutoff > kMaxDistributionCutoff)
            throw PreconditionError("photon-number cutoff above " + std::to_string(kMaxDistributionCutoff) +
                                    " needed for intensity " + std::to_string(mu));
    }
    dist.probabilities_.assign(terms.begin(), terms.begin() + cutoff + 1);
    dist.tail_mass_ = suffix[cutoff + 1];
    return dist;
}

} // namespace mdiqkd

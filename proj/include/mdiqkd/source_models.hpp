#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mdiqkd {

enum class SourceKind { css, nonideal_css, wcs, sps, vacuum };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);

/// Photon source at one intensity. `intensity` is the mean-photon-number
/// parameter mu = |alpha|^2; `odd_weight` is the odd-photon weight a of the
/// non-ideal cat state (1 for an ideal one).
struct SourceSpec {
    SourceKind kind = SourceKind::css;
    double intensity = 0.0;
    double odd_weight = 1.0;

    static SourceSpec css(double mu) { return {SourceKind::css, mu, 1.0}; }
    static SourceSpec nonideal_css(double mu, double a) { return {SourceKind::nonideal_css, mu, a}; }
    static SourceSpec wcs(double mu) { return {SourceKind::wcs, mu, 1.0}; }
    static SourceSpec sps() { return {SourceKind::sps, 0.0, 1.0}; }
    static SourceSpec vacuum() { return {SourceKind::vacuum, 0.0, 1.0}; }

    // Throws DomainError when an invariant is violated.
    void validate() const;
};

inline constexpr double kDefaultTailTolerance = 1e-15;
inline constexpr int kMaxDistributionCutoff = 60;

/// Truncated photon-number distribution p_0..p_cutoff. The probability mass
/// above the cutoff is kept explicitly in tail_mass and is never folded back
/// into the retained terms.
class PhotonDistribution {
public:
    PhotonDistribution() = default;

    // Synthetic distributions (tests, custom sources). Throws DomainError if
    // a probability is outside [0, 1] or the total exceeds 1.
    static PhotonDistribution from_probabilities(std::vector<double> probabilities, double tail_mass = 0.0);

    std::span<const double> probabilities() const { return probabilities_; }
    int cutoff() const { return static_cast<int>(probabilities_.size()) - 1; }
    double tail_mass() const { return tail_mass_; }

    // p_n, or 0 beyond the cutoff.
    double operator[](int n) const {
        return n >= 0 && n <= cutoff() ? probabilities_[static_cast<std::size_t>(n)] : 0.0;
    }

    double retained_mass() const;
    double mean() const;

private:
    friend PhotonDistribution build_distribution(const SourceSpec&, double);

    std::vector<double> probabilities_{1.0};
    double tail_mass_ = 0.0;
};

/// Builds the distribution with the smallest cutoff whose analytic tail mass
/// is below `tail_tolerance`.
///
/// css / nonideal_css: p_odd = a mu^n / (n! sinh mu), p_even = (1 - a) mu^n / (n! cosh mu)
/// wcs: Poisson(mu); sps: p_1 = 1; vacuum: p_0 = 1.
/// mu = 0 for the cat-state families is taken as the analytic limit.
///
/// Throws DomainError for invalid specs or tail_tolerance outside (0, 1e-6],
/// PreconditionError if the cutoff would exceed kMaxDistributionCutoff.
PhotonDistribution build_distribution(const SourceSpec& spec, double tail_tolerance = kDefaultTailTolerance);

} // namespace mdiqkd

#pragma once

// One source configuration evaluated at one distance: gains of every
// intensity-pair channel, the decoy estimate (asymptotic or finite-key), and
// the resulting key rate.

#include <optional>
#include <string>

#include "mdiqkd/decoy_bounds.hpp"
#include "mdiqkd/finite_key.hpp"
#include "mdiqkd/rate_engine.hpp"
#include "mdiqkd/source_models.hpp"

namespace mdiqkd {

enum class Estimator {
    exact_single_photon,  // the source emits single photons only; gains are Y11 directly
    one_decoy,            // ideal cat states, signal + decoy
    decoy_vacuum,         // any distribution, signal + decoy + vacuum
};

std::string_view to_string(Estimator estimator);
std::optional<Estimator> parse_estimator(std::string_view text);
Estimator default_estimator(SourceKind kind);

struct SourceSetup {
    std::string label;
    SourceKind kind = SourceKind::css;
    double signal_mu = 0.1;
    double decoy_mu = 0.01;
    double odd_weight = 1.0;
    Estimator estimator = Estimator::one_decoy;

    // Throws DomainError when the intensities are not strictly decreasing
    // signal > decoy > 0 or the estimator does not fit the source.
    void validate() const;

    static SourceSetup css(double signal = 0.1, double decoy = 0.01);
    static SourceSetup nonideal_css(double odd_weight = 0.7, double signal = 0.1, double decoy = 0.01);
    static SourceSetup wcs(double signal = 0.4, double decoy = 0.07);
    static SourceSetup sps();
};

/// Photon-number distributions of a setup, built once and reused.
class PreparedSource {
public:
    explicit PreparedSource(SourceSetup setup, double tail_tolerance = kDefaultTailTolerance);

    const SourceSetup& setup() const { return setup_; }
    const PhotonDistribution& signal() const { return signal_; }
    const PhotonDistribution& decoy() const { return decoy_; }
    const PhotonDistribution& vacuum() const { return vacuum_; }
    int required_cutoff() const;

private:
    SourceSetup setup_;
    PhotonDistribution signal_, decoy_, vacuum_;
};

struct KeyRatePoint {
    double distance_km = 0.0;
    std::string source;
    Method method = Method::asymptotic;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double rate = 0.0;
    double unclamped_rate = 0.0;
    double q11_z = 0.0;      // P(1)^2 * y11_lower
    double y11_lower = 0.0;  // Z basis
    double e11_upper = 0.0;  // X basis
    GainSet gains;           // signal-signal channel
    unsigned flags = 0;      // DecoyFlag bits from both bases

    double qber_z() const { return gains.z.qber().value_or(0.0); }
};

/// Gains of every channel the estimator needs, collected per basis.
struct ChannelObservations {
    GainSet signal;
    ObservableValues z{}, x{};
};

ChannelObservations observe_channels(const PreparedSource& source, const YieldTable& table, double misalignment);

KeyRatePoint evaluate_point(const PreparedSource& source, const SystemParams& system, const FiniteKeyConfig& finite,
                            const YieldTable& table, double distance_km);

} // namespace mdiqkd

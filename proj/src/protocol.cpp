#include "mdiqkd/protocol.hpp"

#include <algorithm>

#include "mdiqkd/errors.hpp"

namespace mdiqkd {

std::string_view to_string(Estimator estimator) {
    switch (estimator) {
    case Estimator::exact_single_photon: return "exact";
    case Estimator::one_decoy: return "one_decoy";
    case Estimator::decoy_vacuum: return "decoy_vacuum";
    }
    return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view text) {
    if (text == "exact") return Estimator::exact_single_photon;
    if (text == "one_decoy") return Estimator::one_decoy;
    if (text == "decoy_vacuum") return Estimator::decoy_vacuum;
    return std::nullopt;
}

Estimator default_estimator(SourceKind kind) {
    switch (kind) {
    case SourceKind::sps: return Estimator::exact_single_photon;
    case SourceKind::css: return Estimator::one_decoy;
    default: return Estimator::decoy_vacuum;
    }
}

void SourceSetup::validate() const {
    if (kind == SourceKind::vacuum) throw DomainError("a vacuum source cannot carry a key");
    if (estimator == Estimator::exact_single_photon) {
        if (kind != SourceKind::sps) throw DomainError("the exact estimator applies to single-photon sources only");
        return;
    }
    if (kind == SourceKind::sps) throw DomainError("single-photon sources use the exact estimator");
    if (!(decoy_mu > 0.0 && signal_mu > decoy_mu))
        throw DomainError("intensities must satisfy signal > decoy > 0 (got " + std::to_string(signal_mu) + ", " +
                          std::to_string(decoy_mu) + ")");
    if (estimator == Estimator::one_decoy && !(kind == SourceKind::css ||
                                               (kind == SourceKind::nonideal_css && odd_weight == 1.0)))
        throw DomainError("the one-decoy bound needs an ideal cat-state source");
    SourceSpec{kind, signal_mu, odd_weight}.validate();
}

SourceSetup SourceSetup::css(double signal, double decoy) {
    return {"css", SourceKind::css, signal, decoy, 1.0, Estimator::one_decoy};
}

SourceSetup SourceSetup::nonideal_css(double odd_weight, double signal, double decoy) {
    return {"nonideal_css", SourceKind::nonideal_css, signal, decoy, odd_weight, Estimator::decoy_vacuum};
}

SourceSetup SourceSetup::wcs(double signal, double decoy) {
    return {"wcs", SourceKind::wcs, signal, decoy, 1.0, Estimator::decoy_vacuum};
}

SourceSetup SourceSetup::sps() { return {"sps", SourceKind::sps, 0.0, 0.0, 1.0, Estimator::exact_single_photon}; }

PreparedSource::PreparedSource(SourceSetup setup, double tail_tolerance) : setup_(std::move(setup)) {
    setup_.validate();
    if (setup_.kind == SourceKind::sps) {
        signal_ = build_distribution(SourceSpec::sps(), tail_tolerance);
        decoy_ = signal_;
    } else {
        signal_ = build_distribution({setup_.kind, setup_.signal_mu, setup_.odd_weight}, tail_tolerance);
        decoy_ = build_distribution({setup_.kind, setup_.decoy_mu, setup_.odd_weight}, tail_tolerance);
    }
    vacuum_ = build_distribution(SourceSpec::vacuum(), tail_tolerance);
}

int PreparedSource::required_cutoff() const { return std::max({signal_.cutoff(), decoy_.cutoff(), 1}); }

ChannelObservations observe_channels(const PreparedSource& source, const YieldTable& table, double misalignment) {
    ChannelObservations obs;
    DecoyInputs inputs;
    inputs.mu1 = source.setup().signal_mu;
    inputs.mu2 = source.setup().decoy_mu;
    inputs.gains_signal = gains(source.signal(), source.signal(), table, misalignment);
    obs.signal = inputs.gains_signal;
    if (source.setup().estimator != Estimator::exact_single_photon)
        inputs.gains_decoy = gains(source.decoy(), source.decoy(), table, misalignment);
    if (source.setup().estimator == Estimator::decoy_vacuum) {
        const auto& vac = source.vacuum();
        inputs.vacuum = VacuumChannels{
            gains(source.signal(), vac, table, misalignment), gains(vac, source.signal(), table, misalignment),
            gains(source.decoy(), vac, table, misalignment), gains(vac, source.decoy(), table, misalignment),
            gains(vac, vac, table, misalignment)};
    }
    obs.z = observations(inputs, Basis::Z);
    obs.x = observations(inputs, Basis::X);
    return obs;
}

namespace {

// Single-photon source: the gains are the single-photon quantities, only
// their finite-data fluctuation is bounded.
DecoyEstimate exact_estimate(const BasisGains& g, const FiniteKeyConfig& finite) {
    const FluctuationInterval q = fluctuation_interval(g.q, finite);
    const FluctuationInterval eq = fluctuation_interval(g.eq, finite);
    DecoyForm identity;
    at(identity.y11_numerator, Observable::q_signal) = 1.0;
    at(identity.e11_numerator, Observable::eq_decoy) = 1.0;
    ObservableValues q_pick{}, eq_pick{};
    at(q_pick, Observable::q_signal) = q.lower;
    at(eq_pick, Observable::eq_decoy) = eq.upper;
    return evaluate(identity, q_pick, eq_pick);
}

} // namespace

KeyRatePoint evaluate_point(const PreparedSource& source, const SystemParams& system, const FiniteKeyConfig& finite,
                            const YieldTable& table, double distance_km) {
    finite.validate();
    const SourceSetup& setup = source.setup();
    const ChannelObservations obs = observe_channels(source, table, system.misalignment);

    DecoyEstimate est_z, est_x;
    switch (setup.estimator) {
    case Estimator::exact_single_photon:
        est_z = exact_estimate(obs.signal.z, finite);
        est_x = exact_estimate(obs.signal.x, finite);
        break;
    case Estimator::one_decoy: {
        const DecoyForm form = one_decoy_css_form(setup.signal_mu, setup.decoy_mu);
        est_z = worst_case_decoy(form, obs.z, finite);
        est_x = worst_case_decoy(form, obs.x, finite);
        break;
    }
    case Estimator::decoy_vacuum: {
        const DecoyForm form = two_decoy_generic_form(source.signal(), source.decoy());
        est_z = worst_case_decoy(form, obs.z, finite);
        est_x = worst_case_decoy(form, obs.x, finite);
        break;
    }
    }

    KeyRatePoint point;
    point.distance_km = distance_km;
    point.source = setup.label.empty() ? std::string(to_string(setup.kind)) : setup.label;
    point.method = finite.method;
    point.mu1 = setup.estimator == Estimator::exact_single_photon ? 0.0 : setup.signal_mu;
    point.mu2 = setup.estimator == Estimator::exact_single_photon ? 0.0 : setup.decoy_mu;
    point.gains = obs.signal;
    point.y11_lower = est_z.y11_lower;
    point.e11_upper = est_x.e11_upper;
    point.flags = est_z.flags | est_x.flags;
    const double p1 = source.signal()[1];
    point.q11_z = p1 * p1 * est_z.y11_lower;
    if (point.q11_z > 0.0) {
        point.unclamped_rate = key_rate_unclamped(point.q11_z, point.e11_upper, obs.signal.z.q, point.qber_z(),
                                                  system.ec_efficiency);
    } else {
        point.unclamped_rate = -obs.signal.z.q * system.ec_efficiency * binary_entropy(point.qber_z());
    }
    point.rate = std::max(0.0, point.unclamped_rate);
    return point;
}

} // namespace mdiqkd

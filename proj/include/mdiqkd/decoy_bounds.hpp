#pragma once

// Analytical decoy-state bounds on the single-photon-pair yield Y11 and error
// rate e11. Both bounds are linear in the observed gains, so they are kept as
// coefficient vectors over named observables; the asymptotic estimate and the
// finite-key worst case are two ways of evaluating the same form.

#include <array>
#include <cstddef>
#include <optional>

#include "mdiqkd/rate_engine.hpp"
#include "mdiqkd/source_models.hpp"

namespace mdiqkd {

// Gains of one basis. "signal"/"decoy" channels have both parties at that
// intensity; "_vacuum" channels have Bob (or, for "vacuum_", Alice) sending
// vacuum.
enum class Observable : std::size_t {
    q_signal,
    q_decoy,
    eq_decoy,
    q_signal_vacuum,
    q_vacuum_signal,
    q_decoy_vacuum,
    q_vacuum_decoy,
    q_vacuum,
    eq_decoy_vacuum,
    eq_vacuum_decoy,
    eq_vacuum,
};
inline constexpr std::size_t kObservableCount = 11;

using ObservableValues = std::array<double, kObservableCount>;

inline double& at(ObservableValues& values, Observable o) { return values[static_cast<std::size_t>(o)]; }
inline double at(const ObservableValues& values, Observable o) { return values[static_cast<std::size_t>(o)]; }

/// y11 >= <y11_numerator, Q> / y11_denominator
/// e11 <= <e11_numerator, EQ> / (e11_scale * y11)
struct DecoyForm {
    ObservableValues y11_numerator{};
    double y11_denominator = 1.0;
    ObservableValues e11_numerator{};
    double e11_scale = 1.0;
};

enum class DecoyFlag : unsigned {
    clamped_to_zero = 1u << 0,
    error_bound_above_half = 1u << 1,
    denominator_ill_conditioned = 1u << 2,
};

struct DecoyEstimate {
    double y11_lower = 0.0;
    // +infinity when y11_lower is 0 (the error bound is then undefined)
    double e11_upper = 0.0;
    unsigned flags = 0;

    bool has(DecoyFlag f) const { return (flags & static_cast<unsigned>(f)) != 0; }
    void set(DecoyFlag f) { flags |= static_cast<unsigned>(f); }
};

/// One decoy, ideal cat-state sources (odd photon numbers only):
///   y11 >= [mu1^4 sinh^2(mu2) Q_22 - mu2^4 sinh^2(mu1) Q_11] / [mu1^2 mu2^2 (mu1^2 - mu2^2)]
///   e11 <= sinh^2(mu2) EQ_22 / (mu2^2 y11)
/// Throws DomainError unless mu1 > mu2 > 0.
DecoyForm one_decoy_css_form(double mu1, double mu2);

/// Decoy + vacuum bound for an arbitrary photon-number distribution, built on
/// g(mu) = Q_mumu - P_mu(0) (Q_mu0 + Q_0mu) + P_mu(0)^2 Q_00, which removes
/// every term with a vacuum side. Throws PreconditionError when
/// P_mu2(1) P_mu1(2) - P_mu1(1) P_mu2(2) is not safely positive.
DecoyForm two_decoy_generic_form(const PhotonDistribution& signal, const PhotonDistribution& decoy);

/// Evaluates a form. `q_values` feeds the yield numerator, `eq_values` the
/// error numerator. A non-positive yield bound clamps to 0 and leaves the
/// error bound undefined (+infinity).
DecoyEstimate evaluate(const DecoyForm& form, const ObservableValues& q_values, const ObservableValues& eq_values);

struct VacuumChannels {
    GainSet signal_vacuum, vacuum_signal, decoy_vacuum, vacuum_decoy, vacuum_vacuum;
};

struct DecoyInputs {
    double mu1 = 0.0;
    double mu2 = 0.0;
    GainSet gains_signal;
    GainSet gains_decoy;
    std::optional<VacuumChannels> vacuum;
    std::optional<PhotonDistribution> dist_signal;
    std::optional<PhotonDistribution> dist_decoy;
};

/// Observables of one basis. Vacuum-channel entries stay 0 without vacuum channels.
ObservableValues observations(const DecoyInputs& inputs, Basis basis);

/// One-decoy bound on the gains of `basis`. When distributions are supplied
/// they must have no even-photon mass (DomainError otherwise).
DecoyEstimate one_decoy_css(const DecoyInputs& inputs, Basis basis);

/// Decoy + vacuum bound on the gains of `basis`. PreconditionError when the
/// vacuum channels or distributions are missing, or the denominator degenerates.
DecoyEstimate two_decoy_generic(const DecoyInputs& inputs, Basis basis);

} // namespace mdiqkd

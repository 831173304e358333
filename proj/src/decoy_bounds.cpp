#include "mdiqkd/decoy_bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdiqkd/errors.hpp"

namespace mdiqkd {

DecoyForm one_decoy_css_form(double mu1, double mu2) {
    if (!(mu2 > 0.0 && mu1 > mu2) || !std::isfinite(mu1))
        throw DomainError("one-decoy bound needs signal > decoy > 0");
    const double s1 = std::sinh(mu1), s2 = std::sinh(mu2);
    DecoyForm form;
    at(form.y11_numerator, Observable::q_decoy) = std::pow(mu1, 4) * s2 * s2;
    at(form.y11_numerator, Observable::q_signal) = -std::pow(mu2, 4) * s1 * s1;
    form.y11_denominator = mu1 * mu1 * mu2 * mu2 * (mu1 * mu1 - mu2 * mu2);
    at(form.e11_numerator, Observable::eq_decoy) = s2 * s2;
    form.e11_scale = mu2 * mu2;
    return form;
}

DecoyForm two_decoy_generic_form(const PhotonDistribution& signal, const PhotonDistribution& decoy) {
    const double p1_0 = signal[0], p1_1 = signal[1], p1_2 = signal[2];
    const double p2_0 = decoy[0], p2_1 = decoy[1], p2_2 = decoy[2];
    const double cross = p2_1 * p1_2 - p1_1 * p2_2;
    const double scale = std::fabs(p2_1 * p1_2) + std::fabs(p1_1 * p2_2);
    if (!(p1_1 > 0.0 && p2_1 > 0.0) || !(cross > 1e-12 * scale) || scale == 0.0)
        throw PreconditionError("denominator_ill_conditioned: decoy + vacuum bound is degenerate for these "
                                "distributions (P_decoy(1) P_signal(2) - P_signal(1) P_decoy(2) = " +
                                std::to_string(cross) + ")");

    // numerator = c1 g(mu2) - c2 g(mu1)
    const double c1 = p1_1 * p1_2;
    const double c2 = p2_1 * p2_2;
    DecoyForm form;
    auto& y = form.y11_numerator;
    at(y, Observable::q_decoy) = c1;
    at(y, Observable::q_decoy_vacuum) = -c1 * p2_0;
    at(y, Observable::q_vacuum_decoy) = -c1 * p2_0;
    at(y, Observable::q_signal) = -c2;
    at(y, Observable::q_signal_vacuum) = c2 * p1_0;
    at(y, Observable::q_vacuum_signal) = c2 * p1_0;
    at(y, Observable::q_vacuum) = c1 * p2_0 * p2_0 - c2 * p1_0 * p1_0;
    form.y11_denominator = p1_1 * p2_1 * cross;

    auto& e = form.e11_numerator;
    at(e, Observable::eq_decoy) = 1.0;
    at(e, Observable::eq_decoy_vacuum) = -p2_0;
    at(e, Observable::eq_vacuum_decoy) = -p2_0;
    at(e, Observable::eq_vacuum) = p2_0 * p2_0;
    form.e11_scale = p2_1 * p2_1;
    return form;
}

DecoyEstimate evaluate(const DecoyForm& form, const ObservableValues& q_values, const ObservableValues& eq_values) {
    double y_num = 0.0, e_num = 0.0;
    for (std::size_t k = 0; k < kObservableCount; ++k) {
        y_num += form.y11_numerator[k] * q_values[k];
        e_num += form.e11_numerator[k] * eq_values[k];
    }
    DecoyEstimate est;
    est.y11_lower = y_num / form.y11_denominator;
    if (!(est.y11_lower > 0.0)) {
        est.y11_lower = 0.0;
        est.e11_upper = std::numeric_limits<double>::infinity();
        est.set(DecoyFlag::clamped_to_zero);
        return est;
    }
    est.y11_lower = std::min(est.y11_lower, 1.0);
    est.e11_upper = std::max(0.0, e_num) / (form.e11_scale * est.y11_lower);
    if (est.e11_upper > 0.5) est.set(DecoyFlag::error_bound_above_half);
    return est;
}

ObservableValues observations(const DecoyInputs& inputs, Basis basis) {
    ObservableValues v{};
    at(v, Observable::q_signal) = inputs.gains_signal[basis].q;
    at(v, Observable::q_decoy) = inputs.gains_decoy[basis].q;
    at(v, Observable::eq_decoy) = inputs.gains_decoy[basis].eq;
    if (inputs.vacuum) {
        const auto& vac = *inputs.vacuum;
        at(v, Observable::q_signal_vacuum) = vac.signal_vacuum[basis].q;
        at(v, Observable::q_vacuum_signal) = vac.vacuum_signal[basis].q;
        at(v, Observable::q_decoy_vacuum) = vac.decoy_vacuum[basis].q;
        at(v, Observable::q_vacuum_decoy) = vac.vacuum_decoy[basis].q;
        at(v, Observable::q_vacuum) = vac.vacuum_vacuum[basis].q;
        at(v, Observable::eq_decoy_vacuum) = vac.decoy_vacuum[basis].eq;
        at(v, Observable::eq_vacuum_decoy) = vac.vacuum_decoy[basis].eq;
        at(v, Observable::eq_vacuum) = vac.vacuum_vacuum[basis].eq;
    }
    return v;
}

namespace {

bool has_even_mass(const PhotonDistribution& dist) {
    for (int n = 0; n <= dist.cutoff(); n += 2)
        if (dist[n] != 0.0) return true;
    return false;
}

} // namespace

DecoyEstimate one_decoy_css(const DecoyInputs& inputs, Basis basis) {
    const DecoyForm form = one_decoy_css_form(inputs.mu1, inputs.mu2);
    for (const auto* dist : {&inputs.dist_signal, &inputs.dist_decoy})
        if (*dist && has_even_mass(**dist)) throw DomainError("one-decoy bound requires sources without even-photon terms");
    const auto values = observations(inputs, basis);
    return evaluate(form, values, values);
}

DecoyEstimate two_decoy_generic(const DecoyInputs& inputs, Basis basis) {
    if (!inputs.vacuum) throw PreconditionError("decoy + vacuum bound needs the vacuum channels");
    if (!inputs.dist_signal || !inputs.dist_decoy)
        throw PreconditionError("decoy + vacuum bound needs the photon-number distributions");
    if (!(inputs.mu1 > inputs.mu2 && inputs.mu2 > 0.0)) throw DomainError("decoy + vacuum bound needs signal > decoy > 0");
    const DecoyForm form = two_decoy_generic_form(*inputs.dist_signal, *inputs.dist_decoy);
    const auto values = observations(inputs, basis);
    return evaluate(form, values, values);
}

} // namespace mdiqkd

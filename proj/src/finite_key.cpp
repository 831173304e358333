#include "mdiqkd/finite_key.hpp"

#include <algorithm>
#include <cmath>

#include "mdiqkd/errors.hpp"

namespace mdiqkd {

void FiniteKeyConfig::validate() const {
    if (!(pulse_pairs >= 1.0) || !std::isfinite(pulse_pairs)) throw DomainError("pulse count must be at least 1");
    if (!(sigmas > 0.0) || !std::isfinite(sigmas)) throw DomainError("sigma multiplier must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

FluctuationInterval standard_interval(double gain, double n_pulses, double sigmas) {
    if (!(gain >= 0.0 && gain <= 1.0)) throw DomainError("gain must lie in [0, 1]");
    if (!(n_pulses >= 1.0)) throw DomainError("pulse count must be at least 1");
    if (gain == 0.0) return {0.0, 0.0, sigmas * sigmas / n_pulses};
    const double delta = sigmas / std::sqrt(n_pulses * gain);
    return {std::max(0.0, gain * (1.0 - delta)), gain, gain * (1.0 + delta)};
}

FluctuationInterval chernoff_interval(double observed_count, double n_trials, double epsilon) {
    if (!(n_trials >= 1.0)) throw DomainError("trial count must be at least 1");
    if (!(observed_count >= 0.0 && observed_count <= n_trials))
        throw DomainError("observed count must lie in [0, n_trials]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    const double below = std::sqrt(2.0 * observed_count * (-1.5 * std::log(epsilon)));
    const double above = std::sqrt(2.0 * observed_count * (std::log(16.0) - 4.0 * std::log(epsilon)));
    const double lower = std::max(0.0, observed_count - below);
    const double upper = std::min(n_trials, observed_count + above);
    return {lower / n_trials, observed_count / n_trials, upper / n_trials};
}

FluctuationInterval fluctuation_interval(double gain, const FiniteKeyConfig& config) {
    switch (config.method) {
    case Method::asymptotic: return {gain, gain, gain};
    case Method::standard_5sigma: return standard_interval(gain, config.pulse_pairs, config.sigmas);
    case Method::chernoff: return chernoff_interval(gain * config.pulse_pairs, config.pulse_pairs, config.epsilon);
    }
    return {gain, gain, gain};
}

DecoyEstimate worst_case_decoy(const DecoyForm& form, const ObservableValues& expected, const FiniteKeyConfig& config) {
    config.validate();
    if (config.method == Method::asymptotic) return evaluate(form, expected, expected);

    ObservableValues q_pick{}, eq_pick{};
    for (std::size_t k = 0; k < kObservableCount; ++k) {
        const double yc = form.y11_numerator[k];
        const double ec = form.e11_numerator[k];
        if (yc == 0.0 && ec == 0.0) continue;
        const FluctuationInterval iv = fluctuation_interval(expected[k], config);
        // the yield denominator is positive for every valid form
        if (yc != 0.0) q_pick[k] = yc > 0.0 ? iv.lower : iv.upper;
        if (ec != 0.0) eq_pick[k] = ec > 0.0 ? iv.upper : iv.lower;
    }
    return evaluate(form, q_pick, eq_pick);
}

} // namespace mdiqkd

#pragma once

// Finite-data parameter estimation: every gain entering a decoy bound is
// replaced by a confidence interval, and the bound is evaluated at the
// interval endpoints that weaken it.

#include "mdiqkd/decoy_bounds.hpp"
#include "mdiqkd/rate_engine.hpp"

namespace mdiqkd {

// Per-use failure probability for the Chernoff tails; two uses give the
// 5.73e-7 total that a two-sided 5 sigma Gaussian interval carries.
inline constexpr double kDefaultChernoffEpsilon = 2.865e-7;

struct FiniteKeyConfig {
    Method method = Method::standard_5sigma;
    // Uses of each intensity-pair channel. Real-valued so that asymptotic
    // checks can go past the int64 range.
    double pulse_pairs = 1e14;
    double sigmas = 5.0;
    double epsilon = kDefaultChernoffEpsilon;

    void validate() const;
};

struct FluctuationInterval {
    double lower = 0.0;
    double center = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
};

/// Gaussian n-sigma interval: relative half-width sigmas / sqrt(N * gain),
/// lower end clamped at 0. A zero gain maps to [0, sigmas^2 / N].
FluctuationInterval standard_interval(double gain, double n_pulses, double sigmas);

/// Chernoff interval on the expected count given an observed count X out of
/// n_trials, using the two tails
///   Pr(X - E[X] >= sqrt(2 X ln(eps^-3/2))) <= eps
///   Pr(E[X] - X >= sqrt(2 X ln(16 eps^-4))) <= eps,
/// clamped to [0, n_trials] and returned as rates (divided by n_trials).
FluctuationInterval chernoff_interval(double observed_count, double n_trials, double epsilon);

/// Interval for an expected gain under `config`. Observed counts are the
/// deterministic expectations N * gain. Asymptotic gives a zero-width interval.
FluctuationInterval fluctuation_interval(double gain, const FiniteKeyConfig& config);

/// Evaluates `form` at the endpoints that minimize the yield bound and then
/// maximize the error bound, observable by observable.
DecoyEstimate worst_case_decoy(const DecoyForm& form, const ObservableValues& expected, const FiniteKeyConfig& config);

} // namespace mdiqkd

#pragma once

// Scenario configuration, distance sweeps, source comparison, intensity
// optimization and CSV emission.
//
// Config files are flat `section.key = value` lines; `#` starts a comment.
// Every key is optional and defaults to the standard fiber parameters with
// an ideal cat-state source at 0.1 / 0.01.

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mdiqkd/bsm_optics.hpp"
#include "mdiqkd/finite_key.hpp"
#include "mdiqkd/protocol.hpp"
#include "mdiqkd/rate_engine.hpp"

namespace mdiqkd {

struct DistanceGrid {
    double start_km = 0.0;
    double stop_km = 487.5;
    double step_km = 12.5;

    // start, start + step, ... up to stop (inclusive within 1e-9 km).
    std::vector<double> points() const;
};

struct IntensityGrid {
    double mu1_min = 0.05, mu1_max = 0.5;
    int mu1_steps = 10;
    double mu2_min = 0.005, mu2_max = 0.05;
    int mu2_steps = 10;

    std::vector<double> mu1_values() const;
    std::vector<double> mu2_values() const;
};

struct Scenario {
    SourceSetup source = SourceSetup::css();
    SystemParams system;
    DistanceGrid grid;
    FiniteKeyConfig finite;
    int cutoff = 15;
    double tail_tolerance = kDefaultTailTolerance;
    unsigned threads = 0;  // 0: hardware concurrency
    IntensityGrid intensity_grid;
    double yields_distance_km = 0.0;
    double compare_odd_weight = 0.7;

    // Throws DomainError for an empty grid or infeasible intensities.
    void validate() const;
};

/// Parses a config. Unknown keys, malformed values and duplicate keys raise
/// ConfigError carrying the line number; domain violations raise ConfigError
/// too (line 0).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

/// Propagation caches are expensive and distance-independent; this returns a
/// process-wide instance per cutoff.
std::shared_ptr<const PropagationCache> shared_propagation_cache(int cutoff);

std::vector<KeyRatePoint> run_sweep(const Scenario& scenario);

// Standard comparison set: sps, css, non-ideal css (compare_odd_weight), wcs.
std::vector<SourceSetup> comparison_sources(double odd_weight);

/// One row per (source, distance), sources in comparison order.
std::vector<KeyRatePoint> compare_sources(const Scenario& scenario, std::span<const SourceSetup> sources);
std::vector<KeyRatePoint> compare_sources(const Scenario& scenario);

/// Exhaustive grid search per distance over the scenario's intensity grid
/// (cells with mu1 > mu2 only). Ties go to smaller mu1, then smaller mu2.
/// Throws DomainError when no grid cell is feasible.
std::vector<KeyRatePoint> optimize_intensities(const Scenario& scenario);

/// Largest distance with a positive rate, located by a coarse scan from
/// `start_km` in `step_km` increments up to `limit_km` and bisection to
/// `tolerance_km`. Returns start_km if the rate is already 0 there and
/// limit_km if it never drops to 0.
double max_positive_distance(const SourceSetup& source, const Scenario& scenario, double start_km = 0.0,
                             double limit_km = 1000.0, double step_km = 10.0, double tolerance_km = 0.01);

KeyRatePoint evaluate_at(const PreparedSource& source, const Scenario& scenario, double distance_km);

void write_csv(std::ostream& out, std::span<const KeyRatePoint> points);
void write_yields_csv(std::ostream& out, const YieldTable& table);

// 17 significant digits, enough to round-trip a double.
std::string format_real(double value);

} // namespace mdiqkd

#pragma once

// Fock-space model of the relay's Bell-state measurement: a 50:50 beam
// splitter followed by a polarizing beam splitter on each output arm and four
// threshold detectors (1H, 1V, 2H, 2V).

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <vector>

#include "mdiqkd/simd.hpp"
#include "mdiqkd/yield_table.hpp"

namespace mdiqkd {

enum class Polarization { H, V, Plus, Minus };

inline constexpr Polarization kPolarizations[] = {Polarization::H, Polarization::V, Polarization::Plus,
                                                  Polarization::Minus};

// Photon counts at the four detector modes.
struct FockConfig {
    int n1h = 0, n1v = 0, n2h = 0, n2v = 0;

    int total() const { return n1h + n1v + n2h + n2v; }
    auto operator<=>(const FockConfig&) const = default;
};

// Largest photon number per input port whose amplitudes stay exact in 128-bit
// integer arithmetic with margin; yield tables above it are refused.
inline constexpr int kMaxPhotonsPerSide = 20;
inline constexpr int kMaxTotalPhotons = 2 * kMaxPhotonsPerSide;

/// Output photon-number distribution after the splitters, stored as sorted
/// structure-of-arrays columns. Configurations with exactly zero amplitude
/// are omitted; probability() returns 0 for them.
class OutputDistribution {
public:
    int total_photons() const { return total_photons_; }
    std::size_t size() const { return probability_.size(); }

    FockConfig config(std::size_t k) const { return {n1h_[k], n1v_[k], n2h_[k], n2v_[k]}; }
    double probability(std::size_t k) const { return probability_[k]; }
    double probability(const FockConfig& config) const;

    double total_probability() const;

    simd::ConfigView view() const { return {n1h_, n1v_, n2h_, n2v_, probability_}; }

private:
    friend class OutputBuilder;

    int total_photons_ = 0;
    std::vector<std::int32_t> n1h_, n1v_, n2h_, n2v_;
    std::vector<double> probability_;
};

// Coherent: amplitudes of identical output monomials add before squaring.
// Literal: each expansion term is squared on its own (not normalized; kept
// only to compare against the coherent model).
enum class Summation { coherent, literal };

OutputDistribution propagate(int i, Polarization pol_a, int j, Polarization pol_b,
                             Summation summation = Summation::coherent);

struct DetectorParams {
    double efficiency = 1.0;  // overall transmission times detector efficiency
    double dark_count = 0.0;  // per gate

    void validate() const;
};

/// 1 - (1 - p_d)(1 - eta)^n.
double click_probability(int photon_count, const DetectorParams& params);

enum class BellOutcome { psi_plus, psi_minus };

/// Probability that the detector clicks announce `outcome`: psi+ is an H/V
/// coincidence within one arm with the other arm silent, psi- an H/V
/// coincidence across arms with the other two detectors silent.
double bell_yield(const OutputDistribution& dist, BellOutcome outcome, const DetectorParams& params);

/// Distance-independent part of the yield computation: the output
/// distributions of the four canonical input pairs for every (i, j) up to the
/// cutoff. Immutable after construction and safe to share across threads.
class PropagationCache {
public:
    // Throws PreconditionError for cutoff > kMaxPhotonsPerSide, DomainError for cutoff < 1.
    explicit PropagationCache(int cutoff, unsigned threads = 0);

    int cutoff() const { return cutoff_; }

    // pair: 0 = (H, V), 1 = (H, H), 2 = (+, +), 3 = (+, -)
    const OutputDistribution& get(int pair, int i, int j) const;

private:
    int cutoff_;
    std::vector<OutputDistribution> entries_;
};

YieldTable yield_tables(const PropagationCache& cache, const DetectorParams& params);
YieldTable yield_tables(const DetectorParams& params, int cutoff);

} // namespace mdiqkd

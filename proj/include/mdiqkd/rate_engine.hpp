#pragma once

#include <optional>
#include <string>

#include "mdiqkd/bsm_optics.hpp"
#include "mdiqkd/source_models.hpp"
#include "mdiqkd/yield_table.hpp"

namespace mdiqkd {

/// Link and post-processing parameters. Defaults are the telecom-fiber
/// values used throughout: 40 % detectors, 1e-7 dark counts, 0.2 dB/km,
/// 1.5 % misalignment, f = 1.16.
struct SystemParams {
    double detector_efficiency = 0.40;
    double dark_count = 1e-7;
    double fiber_loss_db_per_km = 0.2;
    double misalignment = 0.015;
    double ec_efficiency = 1.16;

    void validate() const;

    // The relay sits halfway, so each arm sees distance_km / 2 of fiber.
    double overall_efficiency(double distance_km) const;
    DetectorParams detector_at(double distance_km) const;
};

struct BasisGains {
    double q = 0.0;          // total gain
    double eq = 0.0;         // error-weighted gain E * Q
    double q_correct = 0.0;
    double q_error = 0.0;

    // E = eq / q; nullopt when q = 0.
    std::optional<double> qber() const;
};

struct GainSet {
    BasisGains z, x;
    // Upper bound on the gain omitted by truncating both distributions.
    double truncation_bound = 0.0;

    const BasisGains& operator[](Basis b) const { return b == Basis::Z ? z : x; }
};

/// Q_C = sum P_a(i) P_b(j) Y_C,ij (likewise Q_E), Q = Q_C + Q_E and
/// EQ = e_d Q_C + (1 - e_d) Q_E, for both bases. Throws PreconditionError if
/// either distribution extends past the table cutoff.
GainSet gains(const PhotonDistribution& dist_a, const PhotonDistribution& dist_b, const YieldTable& table,
              double misalignment);

/// Binary Shannon entropy in bits, with H(0) = H(1) = 0.
double binary_entropy(double x);

/// Q11 (1 - H(e11)) - Q f H(E) before clamping. Phase-error rates above 1/2
/// are evaluated at 1/2.
double key_rate_unclamped(double q11_z, double e11_x, double q_z, double e_z, double f);

/// max(0, key_rate_unclamped(...)).
double key_rate(double q11_z, double e11_x, double q_z, double e_z, double f);

struct SinglePhotonTruth {
    double y11 = 0.0;
    std::optional<double> e11;  // nullopt when y11 = 0
};

/// Exact single-photon yield and error rate of one basis, read from the table.
SinglePhotonTruth true_single_photon_quantities(const YieldTable& table, double misalignment, Basis basis);

enum class Method { asymptotic, standard_5sigma, chernoff };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

} // namespace mdiqkd

#include "mdiqkd/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdiqkd/errors.hpp"
#include "mdiqkd/simd.hpp"

namespace mdiqkd {

void SystemParams::validate() const {
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0))
        throw DomainError("detector efficiency must lie in [0, 1]");
    if (!(dark_count >= 0.0 && dark_count < 1.0)) throw DomainError("dark count must lie in [0, 1)");
    if (!(fiber_loss_db_per_km >= 0.0) || !std::isfinite(fiber_loss_db_per_km))
        throw DomainError("fiber loss must be a finite non-negative number");
    if (!(misalignment >= 0.0 && misalignment <= 1.0)) throw DomainError("misalignment must lie in [0, 1]");
    if (!(ec_efficiency >= 1.0) || !std::isfinite(ec_efficiency))
        throw DomainError("error-correction efficiency must be at least 1");
}

double SystemParams::overall_efficiency(double distance_km) const {
    if (!(distance_km >= 0.0)) throw DomainError("distance must be non-negative");
    return detector_efficiency * std::pow(10.0, -fiber_loss_db_per_km * distance_km / 20.0);
}

DetectorParams SystemParams::detector_at(double distance_km) const {
    return {overall_efficiency(distance_km), dark_count};
}

std::optional<double> BasisGains::qber() const {
    if (q <= 0.0) return std::nullopt;
    return eq / q;
}

GainSet gains(const PhotonDistribution& dist_a, const PhotonDistribution& dist_b, const YieldTable& table,
              double misalignment) {
    if (dist_a.cutoff() > table.cutoff() || dist_b.cutoff() > table.cutoff())
        throw PreconditionError("photon distribution cutoff (" + std::to_string(std::max(dist_a.cutoff(), dist_b.cutoff())) +
                                ") exceeds yield table cutoff (" + std::to_string(table.cutoff()) + ")");
    if (!(misalignment >= 0.0 && misalignment <= 1.0)) throw DomainError("misalignment must lie in [0, 1]");

    const auto& dot = simd::active_kernels().dot;
    const auto pa = dist_a.probabilities();
    const auto pb = dist_b.probabilities();
    const std::size_t nb = pb.size();

    auto double_sum = [&](Basis basis, Role role) {
        std::vector<double> rows(pa.size());
        for (std::size_t i = 0; i < pa.size(); ++i)
            rows[i] = dot(std::span<const double>(table.row(basis, role, static_cast<int>(i)), nb), pb);
        return dot(pa, rows);
    };

    GainSet out;
    for (Basis basis : kBases) {
        BasisGains g;
        g.q_correct = double_sum(basis, Role::correct);
        g.q_error = double_sum(basis, Role::error);
        g.q = g.q_correct + g.q_error;
        g.eq = misalignment * g.q_correct + (1.0 - misalignment) * g.q_error;
        (basis == Basis::Z ? out.z : out.x) = g;
    }
    // yields are probabilities, so the omitted double-sum mass bounds the
    // correct + error gain that was dropped
    out.truncation_bound = dist_a.tail_mass() + dist_b.tail_mass() + dist_a.tail_mass() * dist_b.tail_mass();
    return out;
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary entropy argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double key_rate_unclamped(double q11_z, double e11_x, double q_z, double e_z, double f) {
    if (!(e_z >= 0.0 && e_z <= 1.0)) throw DomainError("QBER must lie in [0, 1]");
    if (!(e11_x >= 0.0)) throw DomainError("phase error rate must be non-negative");
    const double phase = std::isfinite(e11_x) ? std::min(e11_x, 0.5) : 0.5;
    return q11_z * (1.0 - binary_entropy(phase)) - q_z * f * binary_entropy(e_z);
}

double key_rate(double q11_z, double e11_x, double q_z, double e_z, double f) {
    return std::max(0.0, key_rate_unclamped(q11_z, e11_x, q_z, e_z, f));
}

SinglePhotonTruth true_single_photon_quantities(const YieldTable& table, double misalignment, Basis basis) {
    if (table.cutoff() < 1) throw PreconditionError("yield table does not cover (1, 1)");
    const double yc = table.at(basis, Role::correct, 1, 1);
    const double ye = table.at(basis, Role::error, 1, 1);
    SinglePhotonTruth truth;
    truth.y11 = yc + ye;
    if (truth.y11 > 0.0) truth.e11 = (misalignment * yc + (1.0 - misalignment) * ye) / truth.y11;
    return truth;
}

std::string_view to_string(Method method) {
    switch (method) {
    case Method::asymptotic: return "asymptotic";
    case Method::standard_5sigma: return "standard";
    case Method::chernoff: return "chernoff";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
    if (text == "asymptotic") return Method::asymptotic;
    if (text == "standard" || text == "standard_5sigma") return Method::standard_5sigma;
    if (text == "chernoff") return Method::chernoff;
    return std::nullopt;
}

} // namespace mdiqkd

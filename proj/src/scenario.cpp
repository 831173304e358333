#include "mdiqkd/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "mdiqkd/errors.hpp"
#include "parallel.hpp"

namespace mdiqkd {

std::vector<double> DistanceGrid::points() const {
    if (!(step_km > 0.0) || !(stop_km >= start_km) || !(start_km >= 0.0))
        throw DomainError("distance grid needs start >= 0, stop >= start and step > 0");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double d = start_km + static_cast<double>(k) * step_km;
        if (d > stop_km + 1e-9) break;
        out.push_back(d);
    }
    return out;
}

namespace {

std::vector<double> linear_values(double lo, double hi, int steps) {
    if (steps < 1 || !(hi >= lo)) throw DomainError("intensity grid needs steps >= 1 and max >= min");
    if (steps == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) out[k] = lo + (hi - lo) * k / (steps - 1);
    return out;
}

} // namespace

std::vector<double> IntensityGrid::mu1_values() const { return linear_values(mu1_min, mu1_max, mu1_steps); }
std::vector<double> IntensityGrid::mu2_values() const { return linear_values(mu2_min, mu2_max, mu2_steps); }

void Scenario::validate() const {
    if (grid.points().empty()) throw DomainError("distance grid is empty");
    source.validate();
    system.validate();
    finite.validate();
    if (cutoff < 1 || cutoff > kMaxPhotonsPerSide)
        throw DomainError("optics.cutoff must lie in [1, " + std::to_string(kMaxPhotonsPerSide) + "]");
    if (!(compare_odd_weight >= 0.0 && compare_odd_weight <= 1.0))
        throw DomainError("compare.odd_weight must lie in [0, 1]");
    if (!(yields_distance_km >= 0.0)) throw DomainError("yields.distance_km must be non-negative");
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, int line) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ConfigError("expected a number, got '" + std::string(text) + "'", line);
    return value;
}

long long parse_integer(std::string_view text, int line) {
    const double value = parse_real(text, line);
    if (value != std::floor(value) || std::fabs(value) > 9e15)
        throw ConfigError("expected an integer, got '" + std::string(text) + "'", line);
    return static_cast<long long>(value);
}

using Setter = std::function<void(Scenario&, std::string_view, int)>;

Setter real(double Scenario::*field) {
    return [field](Scenario& s, std::string_view v, int line) { s.*field = parse_real(v, line); };
}

template <class Part>
Setter real(Part Scenario::*part, double Part::*field) {
    return [part, field](Scenario& s, std::string_view v, int line) { (s.*part).*field = parse_real(v, line); };
}

template <class Part>
Setter integer(Part Scenario::*part, int Part::*field) {
    return [part, field](Scenario& s, std::string_view v, int line) {
        (s.*part).*field = static_cast<int>(parse_integer(v, line));
    };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"source.kind",
         [](Scenario& s, std::string_view v, int line) {
             const auto kind = parse_source_kind(v);
             if (!kind) throw ConfigError("unknown source kind '" + std::string(v) + "'", line);
             s.source.kind = *kind;
         }},
        {"source.label", [](Scenario& s, std::string_view v, int) { s.source.label = std::string(v); }},
        {"source.signal_mu", real(&Scenario::source, &SourceSetup::signal_mu)},
        {"source.decoy_mu", real(&Scenario::source, &SourceSetup::decoy_mu)},
        {"source.odd_weight", real(&Scenario::source, &SourceSetup::odd_weight)},
        {"source.estimator",
         [](Scenario& s, std::string_view v, int line) {
             if (v == "auto") return;
             const auto est = parse_estimator(v);
             if (!est) throw ConfigError("unknown estimator '" + std::string(v) + "'", line);
             s.source.estimator = *est;
         }},
        {"system.detector_efficiency", real(&Scenario::system, &SystemParams::detector_efficiency)},
        {"system.dark_count", real(&Scenario::system, &SystemParams::dark_count)},
        {"system.fiber_loss", real(&Scenario::system, &SystemParams::fiber_loss_db_per_km)},
        {"system.misalignment", real(&Scenario::system, &SystemParams::misalignment)},
        {"system.ec_efficiency", real(&Scenario::system, &SystemParams::ec_efficiency)},
        {"sweep.start_km", real(&Scenario::grid, &DistanceGrid::start_km)},
        {"sweep.stop_km", real(&Scenario::grid, &DistanceGrid::stop_km)},
        {"sweep.step_km", real(&Scenario::grid, &DistanceGrid::step_km)},
        {"finite.method",
         [](Scenario& s, std::string_view v, int line) {
             const auto m = parse_method(v);
             if (!m) throw ConfigError("unknown method '" + std::string(v) + "'", line);
             s.finite.method = *m;
         }},
        {"finite.pulses", real(&Scenario::finite, &FiniteKeyConfig::pulse_pairs)},
        {"finite.sigmas", real(&Scenario::finite, &FiniteKeyConfig::sigmas)},
        {"finite.epsilon", real(&Scenario::finite, &FiniteKeyConfig::epsilon)},
        {"optics.cutoff",
         [](Scenario& s, std::string_view v, int line) { s.cutoff = static_cast<int>(parse_integer(v, line)); }},
        {"optics.tail_tolerance", real(&Scenario::tail_tolerance)},
        {"run.threads",
         [](Scenario& s, std::string_view v, int line) {
             const auto n = parse_integer(v, line);
             if (n < 0) throw ConfigError("run.threads must be non-negative", line);
             s.threads = static_cast<unsigned>(n);
         }},
        {"optimize.mu1_min", real(&Scenario::intensity_grid, &IntensityGrid::mu1_min)},
        {"optimize.mu1_max", real(&Scenario::intensity_grid, &IntensityGrid::mu1_max)},
        {"optimize.mu1_steps", integer(&Scenario::intensity_grid, &IntensityGrid::mu1_steps)},
        {"optimize.mu2_min", real(&Scenario::intensity_grid, &IntensityGrid::mu2_min)},
        {"optimize.mu2_max", real(&Scenario::intensity_grid, &IntensityGrid::mu2_max)},
        {"optimize.mu2_steps", integer(&Scenario::intensity_grid, &IntensityGrid::mu2_steps)},
        {"yields.distance_km", real(&Scenario::yields_distance_km)},
        {"compare.odd_weight", real(&Scenario::compare_odd_weight)},
    };
    return table;
}

} // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario scenario;
    scenario.source.label.clear();
    std::set<std::string, std::less<>> seen;
    bool estimator_given = false;
    std::string raw;
    for (int line = 1; std::getline(in, raw); ++line) {
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
        const std::string_view key = trim(text.substr(0, eq));
        const std::string_view value = trim(text.substr(eq + 1));
        if (value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line);
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'", line);
        if (!seen.insert(std::string(key)).second) throw ConfigError("duplicate key '" + std::string(key) + "'", line);
        if (key == "source.estimator" && value != "auto") estimator_given = true;
        it->second(scenario, value, line);
    }
    if (!estimator_given) scenario.source.estimator = default_estimator(scenario.source.kind);
    if (!seen.contains("source.odd_weight"))
        scenario.source.odd_weight = scenario.source.kind == SourceKind::nonideal_css ? 0.7 : 1.0;
    if (scenario.source.label.empty()) scenario.source.label = std::string(to_string(scenario.source.kind));
    try {
        scenario.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_scenario(in);
}

// ---------------------------------------------------------------------------
// sweeps

std::shared_ptr<const PropagationCache> shared_propagation_cache(int cutoff) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const PropagationCache>> caches;
    std::lock_guard lock(mutex);
    auto& slot = caches[cutoff];
    if (!slot) slot = std::make_shared<const PropagationCache>(cutoff);
    return slot;
}

namespace {

void check_cutoff(const PreparedSource& source, int cutoff) {
    if (source.required_cutoff() > cutoff)
        throw PreconditionError("source '" + source.setup().label + "' needs a photon cutoff of " +
                                std::to_string(source.required_cutoff()) + " but optics.cutoff is " +
                                std::to_string(cutoff));
}

} // namespace

KeyRatePoint evaluate_at(const PreparedSource& source, const Scenario& scenario, double distance_km) {
    check_cutoff(source, scenario.cutoff);
    const auto cache = shared_propagation_cache(scenario.cutoff);
    const YieldTable table = yield_tables(*cache, scenario.system.detector_at(distance_km));
    return evaluate_point(source, scenario.system, scenario.finite, table, distance_km);
}

std::vector<KeyRatePoint> run_sweep(const Scenario& scenario) {
    const SourceSetup setup = scenario.source;
    return compare_sources(scenario, std::span<const SourceSetup>(&setup, 1));
}

std::vector<SourceSetup> comparison_sources(double odd_weight) {
    return {SourceSetup::sps(), SourceSetup::css(), SourceSetup::nonideal_css(odd_weight), SourceSetup::wcs()};
}

std::vector<KeyRatePoint> compare_sources(const Scenario& scenario, std::span<const SourceSetup> sources) {
    scenario.validate();
    std::vector<PreparedSource> prepared;
    for (const auto& s : sources) {
        prepared.emplace_back(s, scenario.tail_tolerance);
        check_cutoff(prepared.back(), scenario.cutoff);
    }
    const auto cache = shared_propagation_cache(scenario.cutoff);
    const auto distances = scenario.grid.points();
    std::vector<std::vector<KeyRatePoint>> by_distance(distances.size());
    detail::parallel_for(distances.size(), scenario.threads, [&](std::size_t k) {
        const YieldTable table = yield_tables(*cache, scenario.system.detector_at(distances[k]));
        for (const auto& src : prepared)
            by_distance[k].push_back(evaluate_point(src, scenario.system, scenario.finite, table, distances[k]));
    });
    std::vector<KeyRatePoint> rows;
    rows.reserve(distances.size() * prepared.size());
    for (std::size_t s = 0; s < prepared.size(); ++s)
        for (const auto& at_distance : by_distance) rows.push_back(at_distance[s]);
    return rows;
}

std::vector<KeyRatePoint> compare_sources(const Scenario& scenario) {
    const auto sources = comparison_sources(scenario.compare_odd_weight);
    return compare_sources(scenario, sources);
}

std::vector<KeyRatePoint> optimize_intensities(const Scenario& scenario) {
    scenario.validate();
    std::vector<PreparedSource> cells;
    for (double mu1 : scenario.intensity_grid.mu1_values()) {
        for (double mu2 : scenario.intensity_grid.mu2_values()) {
            if (!(mu1 > mu2 && mu2 > 0.0)) continue;
            SourceSetup setup = scenario.source;
            setup.signal_mu = mu1;
            setup.decoy_mu = mu2;
            cells.emplace_back(setup, scenario.tail_tolerance);
            check_cutoff(cells.back(), scenario.cutoff);
        }
    }
    if (cells.empty()) throw DomainError("intensity grid has no cell with mu1 > mu2 > 0");

    const auto cache = shared_propagation_cache(scenario.cutoff);
    const auto distances = scenario.grid.points();
    std::vector<KeyRatePoint> best(distances.size());
    detail::parallel_for(distances.size(), scenario.threads, [&](std::size_t k) {
        const YieldTable table = yield_tables(*cache, scenario.system.detector_at(distances[k]));
        bool have = false;
        // cells are ordered by ascending mu1 then mu2, so strict improvement
        // keeps the smallest intensities among ties
        for (const auto& cell : cells) {
            KeyRatePoint p = evaluate_point(cell, scenario.system, scenario.finite, table, distances[k]);
            if (!have || p.rate > best[k].rate) {
                best[k] = std::move(p);
                have = true;
            }
        }
    });
    return best;
}

double max_positive_distance(const SourceSetup& setup, const Scenario& scenario, double start_km, double limit_km,
                             double step_km, double tolerance_km) {
    const PreparedSource source(setup, scenario.tail_tolerance);
    auto positive = [&](double d) { return evaluate_at(source, scenario, d).rate > 0.0; };
    if (!positive(start_km)) return start_km;
    double lo = start_km;
    double hi = lo;
    while (true) {
        hi = std::min(lo + step_km, limit_km);
        if (!positive(hi)) break;
        if (hi >= limit_km) return limit_km;
        lo = hi;
    }
    while (hi - lo > tolerance_km) {
        const double mid = 0.5 * (lo + hi);
        (positive(mid) ? lo : hi) = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// output

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(std::ostream& out, std::span<const KeyRatePoint> points) {
    out << "distance_km,source,method,mu1,mu2,q_z,E_z,y11_lower,e11_upper,rate\n";
    for (const auto& p : points) {
        out << format_real(p.distance_km) << ',' << p.source << ',' << to_string(p.method) << ','
            << format_real(p.mu1) << ',' << format_real(p.mu2) << ',' << format_real(p.gains.z.q) << ','
            << format_real(p.qber_z()) << ',' << format_real(p.y11_lower) << ',' << format_real(p.e11_upper) << ','
            << format_real(p.rate) << '\n';
    }
}

void write_yields_csv(std::ostream& out, const YieldTable& table) {
    out << "i,j,basis,role,yield\n";
    for (Basis basis : kBases) {
        for (Role role : {Role::correct, Role::error}) {
            for (int i = 0; i <= table.cutoff(); ++i) {
                for (int j = 0; j <= table.cutoff(); ++j) {
                    out << i << ',' << j << ',' << (basis == Basis::Z ? "Z" : "X") << ','
                        << (role == Role::correct ? "correct" : "error") << ','
                        << format_real(table.at(basis, role, i, j)) << '\n';
                }
            }
        }
    }
}

} // namespace mdiqkd

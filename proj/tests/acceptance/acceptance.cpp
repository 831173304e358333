// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is non-zero when a gating criterion fails.
//
//   acceptance [--artifacts DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mdiqkd/bsm_optics.hpp"
#include "mdiqkd/decoy_bounds.hpp"
#include "mdiqkd/protocol.hpp"
#include "mdiqkd/scenario.hpp"
#include "oracles/oracles.hpp"

using namespace mdiqkd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    bool gating = true;
    std::vector<std::string> details;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

Scenario fiber_scenario(Method method, double pulses) {
    Scenario s;
    s.finite.method = method;
    s.finite.pulse_pairs = pulses;
    return s;
}

Outcome normalization() {
    Outcome out;
    const auto t0 = Clock::now();
    double worst_source = 0.0;
    for (double mu = 1e-4; mu <= 3.0; mu *= 1.2) {
        for (const auto& spec : {SourceSpec::css(mu), SourceSpec::nonideal_css(mu, 0.7), SourceSpec::nonideal_css(mu, 0.3),
                                 SourceSpec::wcs(mu)}) {
            const auto d = build_distribution(spec);
            double sum = 0.0;
            for (double p : d.probabilities()) sum += p;
            worst_source = std::max(worst_source, std::abs(sum + d.tail_mass() - 1.0));
        }
    }
    for (const auto& spec : {SourceSpec::sps(), SourceSpec::vacuum()})
        worst_source = std::max(worst_source, std::abs(build_distribution(spec).retained_mass() - 1.0));

    double worst_optics = 0.0;
    int count = 0;
    for (int i = 0; i <= kMaxTotalPhotons; ++i)
        for (int j = 0; i + j <= kMaxTotalPhotons; ++j)
            for (auto pa : kPolarizations)
                for (auto pb : kPolarizations) {
                    worst_optics = std::max(worst_optics, std::abs(propagate(i, pa, j, pb).total_probability() - 1.0));
                    ++count;
                }
    const double elapsed = seconds_since(t0);
    out.pass = worst_source < 1e-12 && worst_optics < 1e-12 && elapsed < 10.0;
    out.details.push_back(fmt("source distributions: max |sum - 1| = %.3g", worst_source));
    out.details.push_back(fmt("%d propagations (i + j <= %d, 16 polarization pairs): max |sum - 1| = %.3g", count,
                              kMaxTotalPhotons, worst_optics));
    out.details.push_back(fmt("runtime %.2f s (limit 10 s)", elapsed));
    return out;
}

Outcome hong_ou_mandel() {
    Outcome out;
    double worst = 0.0;
    for (auto pol : kPolarizations) {
        const auto d = propagate(1, pol, 1, pol);
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto c = d.config(k);
            if (c.n1h + c.n1v == 1 && c.n2h + c.n2v == 1) worst = std::max(worst, d.probability(k));
        }
    }
    out.pass = worst < 1e-14;
    out.details.push_back(fmt("max mixed-arm probability %.3g (limit 1e-14)", worst));
    return out;
}

Outcome vacuum_closed_form() {
    Outcome out;
    double worst = 0.0;
    const auto d = propagate(0, Polarization::H, 0, Polarization::H);
    for (double pd : {1e-7, 1e-6, 1e-3})
        for (double eta : {0.0, 0.04, 1.0}) {
            const double y = bell_yield(d, BellOutcome::psi_plus, {eta, pd});
            const double expected = 2 * pd * pd * (1 - pd) * (1 - pd);
            worst = std::max(worst, rel(y, expected));
        }
    out.pass = worst <= 1e-15;
    out.details.push_back(fmt("max relative deviation %.3g (limit 1e-15)", worst));
    return out;
}

Outcome loss_oracle() {
    Outcome out;
    double worst = 0.0;
    int cases = 0;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j)
            for (auto pa : kPolarizations)
                for (auto pb : kPolarizations) {
                    const auto d = propagate(i, pa, j, pb);
                    for (double eta : {0.1, 0.5, 1.0})
                        for (double pd : {0.0, 1e-7, 1e-3})
                            for (auto outcome : {BellOutcome::psi_plus, BellOutcome::psi_minus}) {
                                const double got = bell_yield(d, outcome, {eta, pd});
                                const double want = oracle::loss_enumeration_yield(d, outcome, eta, pd);
                                worst = std::max(worst, want == 0.0 ? std::abs(got) : rel(got, want));
                                ++cases;
                            }
                }
    out.pass = worst <= 1e-12;
    out.details.push_back(fmt("%d cases, max relative deviation %.3g (limit 1e-12)", cases, worst));
    return out;
}

Outcome decoy_sandwich() {
    Outcome out;
    const auto t0 = Clock::now();
    const SystemParams sys;
    const auto cache = shared_propagation_cache(15);
    const SourceSetup setups[] = {SourceSetup::css(), SourceSetup::nonideal_css(0.7), SourceSetup::wcs()};
    int violations = 0, checks = 0;
    double min_y_margin = INFINITY, min_e_margin = INFINITY;
    for (const auto& setup : setups) {
        const PreparedSource src(setup);
        const DecoyForm form = setup.estimator == Estimator::one_decoy
                                   ? one_decoy_css_form(setup.signal_mu, setup.decoy_mu)
                                   : two_decoy_generic_form(src.signal(), src.decoy());
        for (double L = 0.0; L <= 400.0; L += 25.0) {
            const auto table = yield_tables(*cache, sys.detector_at(L));
            const auto obs = observe_channels(src, table, sys.misalignment);
            for (Basis basis : kBases) {
                const auto& values = basis == Basis::Z ? obs.z : obs.x;
                const auto est = evaluate(form, values, values);
                const auto truth = true_single_photon_quantities(table, sys.misalignment, basis);
                const double slack_y = 1e-12 * truth.y11;
                const double slack_e = 1e-12 * truth.e11.value_or(0.0);
                const bool ok = truth.e11 && est.y11_lower <= truth.y11 + slack_y &&
                                est.e11_upper >= *truth.e11 - slack_e;
                ++checks;
                if (!ok) {
                    ++violations;
                    out.details.push_back(fmt("violation: %s L = %g basis %s", setup.label.c_str(), L,
                                              basis == Basis::Z ? "Z" : "X"));
                }
                if (truth.y11 > 0.0) min_y_margin = std::min(min_y_margin, (truth.y11 - est.y11_lower) / truth.y11);
                if (truth.e11) min_e_margin = std::min(min_e_margin, (est.e11_upper - *truth.e11) / *truth.e11);
            }
        }
    }
    const double elapsed = seconds_since(t0);
    out.pass = violations == 0 && elapsed < 60.0;
    out.details.push_back(fmt("%d checks, %d violations", checks, violations));
    out.details.push_back(fmt("tightest relative margins: y11 %.3g, e11 %.3g", min_y_margin, min_e_margin));
    out.details.push_back(fmt("runtime %.2f s (limit 60 s)", elapsed));
    return out;
}

struct Cutoffs {
    double sps, css, nonideal, wcs;
};

Cutoffs cutoffs(const Scenario& s) {
    return {max_positive_distance(SourceSetup::sps(), s), max_positive_distance(SourceSetup::css(), s),
            max_positive_distance(SourceSetup::nonideal_css(0.7), s), max_positive_distance(SourceSetup::wcs(), s)};
}

// Pulse count at which the WCS cutoff under the 5 sigma analysis lands in
// [170, 230] km, closest to 200 km, scanned over [1e12, 1e16].
Outcome calibrate(double& calibrated) {
    Outcome out;
    out.gating = false;
    double best_n = 0.0, best_wcs = 0.0, best_gap = INFINITY;
    double closest_n = 0.0, closest_wcs = 0.0, closest_gap = INFINITY;
    for (double e = 12.0; e <= 16.0 + 1e-9; e += 0.25) {
        const double n = std::pow(10.0, e);
        const double wcs = max_positive_distance(SourceSetup::wcs(), fiber_scenario(Method::standard_5sigma, n));
        out.details.push_back(fmt("N = 1e%.2f: WCS cutoff %.2f km", e, wcs));
        const double gap = std::abs(wcs - 200.0);
        if (wcs >= 170.0 && wcs <= 230.0 && gap < best_gap) {
            best_gap = gap;
            best_n = n;
            best_wcs = wcs;
        }
        if (gap < closest_gap) {
            closest_gap = gap;
            closest_n = n;
            closest_wcs = wcs;
        }
    }
    if (best_n == 0.0) {
        calibrated = closest_n;
        out.details.push_back(
            fmt("no N in [1e12, 1e16] puts WCS in [170, 230] km; closest N = %.3g gives %.2f km", closest_n, closest_wcs));
        const double non = max_positive_distance(SourceSetup::nonideal_css(0.7),
                                                 fiber_scenario(Method::standard_5sigma, closest_n));
        out.details.push_back(fmt("non-ideal CSS (a = 0.7) at that N: %.2f km", non));
        return out;
    }
    calibrated = best_n;
    const double non =
        max_positive_distance(SourceSetup::nonideal_css(0.7), fiber_scenario(Method::standard_5sigma, best_n));
    out.pass = non > 400.0;
    out.details.push_back(fmt("calibrated N = %.6g: WCS cutoff %.2f km, non-ideal CSS (a = 0.7) cutoff %.2f km (needs > 400)",
                              best_n, best_wcs, non));
    return out;
}

Outcome ordering(double pulses) {
    Outcome out;
    out.pass = true;
    for (auto [label, s] : {std::pair{std::string("asymptotic"), fiber_scenario(Method::asymptotic, 1.0)},
                            std::pair{fmt("standard, N = %.3g", pulses), fiber_scenario(Method::standard_5sigma, pulses)}}) {
        const auto c = cutoffs(s);
        const bool ok = c.sps >= c.css && c.css >= c.nonideal && c.nonideal >= c.wcs;
        out.pass = out.pass && ok;
        out.details.push_back(fmt("%s: SPS %.2f >= CSS %.2f >= non-ideal CSS %.2f >= WCS %.2f km %s", label.c_str(),
                                  c.sps, c.css, c.nonideal, c.wcs, ok ? "" : "(violated)"));
    }
    return out;
}

Outcome convergence(const std::filesystem::path& artifacts) {
    Outcome out;
    out.pass = true;
    const auto sources = comparison_sources(0.7);
    const auto asym_scenario = fiber_scenario(Method::asymptotic, 1.0);
    const auto asym = compare_sources(asym_scenario, sources);
    std::map<std::string, double> edge;
    for (const auto& s : sources) edge[s.label] = max_positive_distance(s, asym_scenario);
    for (Method m : {Method::standard_5sigma, Method::chernoff}) {
        int above = 0, far = 0, positive = 0;
        double worst = 0.0;
        for (double n : {1e12, 1e13, 1e14, 1e16, 1e20}) {
            const auto fin = compare_sources(fiber_scenario(m, n), sources);
            for (std::size_t k = 0; k < fin.size(); ++k) {
                if (fin[k].rate > asym[k].rate) ++above;
                if (n == 1e20 && asym[k].rate > 0.0) {
                    ++positive;
                    const double r = (asym[k].rate - fin[k].rate) / asym[k].rate;
                    worst = std::max(worst, r);
                    if (r >= 0.01) {
                        ++far;
                        const double cut = edge[fin[k].source];
                        out.details.push_back(fmt("%s %s at %g km: %.3g%% below asymptotic (%.2f km inside its "
                                                  "asymptotic cutoff of %.2f km)",
                                                  fin[k].source.c_str(), std::string(to_string(m)).c_str(),
                                                  fin[k].distance_km, 100 * r, cut - fin[k].distance_km, cut));
                    }
                }
            }
        }
        out.pass = out.pass && above == 0 && far == 0;
        out.details.push_back(fmt("%s: %d points above asymptotic; at N = 1e20, %d positive points, worst gap %.3g%%",
                                  std::string(to_string(m)).c_str(), above, positive, 100 * worst));
    }

    std::error_code ec;
    std::filesystem::create_directories(artifacts, ec);
    const auto path = artifacts / "statistical_methods.csv";
    std::ofstream csv(path);
    csv << "pulses,distance_km,source,method,mu1,mu2,q_z,E_z,y11_lower,e11_upper,rate\n";
    for (double n : {1e12, 1e13, 1e14}) {
        std::string line;
        for (Method m : {Method::standard_5sigma, Method::chernoff}) {
            const auto s = fiber_scenario(m, n);
            const SourceSetup setups[] = {SourceSetup::css(), SourceSetup::wcs()};
            for (const auto& p : compare_sources(s, setups)) {
                csv << format_real(n) << ',' << format_real(p.distance_km) << ',' << p.source << ','
                    << to_string(p.method) << ',' << format_real(p.mu1) << ',' << format_real(p.mu2) << ','
                    << format_real(p.gains.z.q) << ',' << format_real(p.qber_z()) << ',' << format_real(p.y11_lower)
                    << ',' << format_real(p.e11_upper) << ',' << format_real(p.rate) << '\n';
            }
            line += fmt(" %s: CSS %.1f km, WCS %.1f km;", std::string(to_string(m)).c_str(),
                        max_positive_distance(SourceSetup::css(), s), max_positive_distance(SourceSetup::wcs(), s));
        }
        out.details.push_back(fmt("N = %.0e", n) + line);
    }
    out.details.push_back("method comparison table written to " + path.string());
    if (!csv) {
        out.pass = false;
        out.details.push_back("could not write the comparison table");
    }
    return out;
}

Outcome performance(double elapsed, std::size_t rows) {
    Outcome out;
    out.pass = elapsed < 60.0 && rows == 160;
    out.details.push_back(fmt("compare, 4 sources x 40 distances, cutoff 15, standard 5 sigma, cold start: %zu rows in %.2f s "
                              "(limit 60 s), %u hardware threads",
                              rows, elapsed, std::thread::hardware_concurrency()));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::filesystem::path artifacts = ".";
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--artifacts" && k + 1 < argc) {
            artifacts = argv[++k];
        } else {
            std::fprintf(stderr, "usage: %s [--artifacts DIR]\n", argv[0]);
            return 2;
        }
    }

    // first, so the propagation cache is built inside the timed run
    const auto t0 = Clock::now();
    const auto perf_rows = compare_sources(Scenario{});
    const double perf_elapsed = seconds_since(t0);

    double calibrated = 1e14;
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"normalization of sources and propagation", normalization},
        {"Hong-Ou-Mandel suppression", hong_ou_mandel},
        {"vacuum yield closed form", vacuum_closed_form},
        {"loss and dark-count oracle", loss_oracle},
        {"decoy bounds sandwich the exact values", decoy_sandwich},
        {"distance claims at calibrated N", [&] { return calibrate(calibrated); }},
        {"source ordering of maximum distance", [&] { return ordering(calibrated); }},
        {"finite-key convergence", [&] { return convergence(artifacts); }},
        {"compare performance", [&] { return performance(perf_elapsed, perf_rows.size()); }},
    };

    int gating_failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.details.push_back(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %zu. %s%s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.gating ? "" : " (non-gating)");
        for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
        std::fflush(stdout);
        if (!o.pass && o.gating) ++gating_failures;
    }
    return gating_failures == 0 ? 0 : 1;
}

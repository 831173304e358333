// Command-line front end: sweep | compare | optimize | yields.
//
// Exit codes: 0 success (including all-zero rates), 2 configuration or usage
// error, 3 numeric precondition failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mdiqkd/errors.hpp"
#include "mdiqkd/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string config_path;
    std::string out_path;
    std::optional<std::string> method;
    std::optional<double> pulses;
    std::optional<unsigned> threads;
};

mdiqkd::Scenario load(const Options& opts) {
    mdiqkd::Scenario scenario;
    if (!opts.config_path.empty()) {
        scenario = mdiqkd::load_scenario(opts.config_path);
    } else {
        std::istringstream empty;
        scenario = mdiqkd::parse_scenario(empty);
    }
    if (opts.method) {
        const auto m = mdiqkd::parse_method(*opts.method);
        if (!m) throw mdiqkd::ConfigError("unknown --method '" + *opts.method + "'");
        scenario.finite.method = *m;
    }
    if (opts.pulses) scenario.finite.pulse_pairs = *opts.pulses;
    if (opts.threads) scenario.threads = *opts.threads;
    try {
        scenario.validate();
    } catch (const mdiqkd::DomainError& e) {
        throw mdiqkd::ConfigError(e.what());
    }
    return scenario;
}

template <class Emit>
void with_output(const Options& opts, Emit&& emit) {
    if (opts.out_path.empty() || opts.out_path == "-") {
        emit(std::cout);
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw mdiqkd::ConfigError("cannot open output file '" + opts.out_path + "'");
    emit(out);
    if (!out) throw mdiqkd::ConfigError("failed writing '" + opts.out_path + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Key rates for measurement-device-independent QKD with cat-state and comparison sources"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "key = value scenario file")->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_path, "CSV output path (default stdout)");
    };
    auto add_rate_flags = [&](CLI::App* sub) {
        sub->add_option("--method", opts.method, "asymptotic | standard | chernoff")
            ->check(CLI::IsMember({"asymptotic", "standard", "chernoff"}));
        sub->add_option("--pulses", opts.pulses, "pulse pairs per intensity channel (N)");
        sub->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    };

    auto* sweep = app.add_subcommand("sweep", "key rate vs distance for the configured source");
    auto* compare = app.add_subcommand("compare", "sweep sps, css, non-ideal css and wcs into one table");
    auto* optimize = app.add_subcommand("optimize", "grid-search signal/decoy intensities per distance");
    auto* yields = app.add_subcommand("yields", "dump the photon-number yield table at yields.distance_km");
    for (auto* sub : {sweep, compare, optimize}) {
        add_common(sub);
        add_rate_flags(sub);
    }
    add_common(yields);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const mdiqkd::Scenario scenario = load(opts);
        if (*sweep) {
            const auto rows = mdiqkd::run_sweep(scenario);
            with_output(opts, [&](std::ostream& out) { mdiqkd::write_csv(out, rows); });
        } else if (*compare) {
            const auto rows = mdiqkd::compare_sources(scenario);
            with_output(opts, [&](std::ostream& out) { mdiqkd::write_csv(out, rows); });
        } else if (*optimize) {
            const auto rows = mdiqkd::optimize_intensities(scenario);
            with_output(opts, [&](std::ostream& out) { mdiqkd::write_csv(out, rows); });
        } else if (*yields) {
            const auto cache = mdiqkd::shared_propagation_cache(scenario.cutoff);
            const auto table =
                mdiqkd::yield_tables(*cache, scenario.system.detector_at(scenario.yields_distance_km));
            with_output(opts, [&](std::ostream& out) { mdiqkd::write_yields_csv(out, table); });
        }
    } catch (const mdiqkd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mdiqkd::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mdiqkd::PreconditionError& e) {
        std::cerr << "numeric precondition failed: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}

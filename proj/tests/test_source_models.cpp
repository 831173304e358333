#include <doctest.h>

#include <cmath>

#include "mdiqkd/errors.hpp"
#include "mdiqkd/source_models.hpp"

using namespace mdiqkd;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    return out;
}

} // namespace

TEST_CASE("css keeps only odd photon numbers") {
    const auto d = build_distribution(SourceSpec::css(0.1));
    for (int n = 0; n <= d.cutoff(); n += 2) CHECK(d[n] == 0.0);
    // 50-digit evaluation of mu^n / (n! sinh mu)
    CHECK(d[1] == doctest::Approx(0.99833527572961096379).epsilon(1e-13));
    CHECK(d[3] == doctest::Approx(1.6638921262160182730e-3).epsilon(1e-13));
    CHECK(d[5] == doctest::Approx(8.3194606310800913650e-7).epsilon(1e-13));
}

TEST_CASE("nonideal css small-intensity limit") {
    const auto d = build_distribution(SourceSpec::nonideal_css(1e-9, 0.7));
    CHECK(d[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.7).epsilon(1e-12));

    const auto at_zero = build_distribution(SourceSpec::nonideal_css(0.0, 0.7));
    CHECK(at_zero[0] == doctest::Approx(0.3));
    CHECK(at_zero[1] == doctest::Approx(0.7));
    const auto css_zero = build_distribution(SourceSpec::css(0.0));
    CHECK(css_zero[0] == 0.0);
    CHECK(css_zero[1] == 1.0);
}

TEST_CASE("vacuum and single-photon sources") {
    const auto vac = build_distribution(SourceSpec::vacuum());
    CHECK(vac.cutoff() == 0);
    CHECK(vac[0] == 1.0);
    CHECK(vac.tail_mass() == 0.0);
    const auto sps = build_distribution(SourceSpec::sps());
    CHECK(sps.cutoff() == 1);
    CHECK(sps[1] == 1.0);
    CHECK(sps[0] == 0.0);
}

TEST_CASE("normalization over a log grid of intensities") {
    for (double mu : log_grid(1e-4, 2.0, 25)) {
        for (const auto& spec : {SourceSpec::css(mu), SourceSpec::nonideal_css(mu, 0.7), SourceSpec::wcs(mu)}) {
            const auto d = build_distribution(spec);
            CAPTURE(mu);
            CHECK(std::fabs(d.retained_mass() + d.tail_mass() - 1.0) < 1e-12);
            CHECK(d.tail_mass() < kDefaultTailTolerance);
            for (double p : d.probabilities()) CHECK((p >= 0.0 && p <= 1.0));
        }
    }
}

TEST_CASE("nonideal css with a = 1 is bit-identical to css") {
    for (double mu : {0.01, 0.1, 0.5, 1.7}) {
        const auto a = build_distribution(SourceSpec::css(mu));
        const auto b = build_distribution(SourceSpec::nonideal_css(mu, 1.0));
        REQUIRE(a.cutoff() == b.cutoff());
        for (int n = 0; n <= a.cutoff(); ++n) CHECK(a[n] == b[n]);
        CHECK(a.tail_mass() == b.tail_mass());
    }
}

TEST_CASE("truncated poisson mean") {
    for (double mu : {0.07, 0.4, 1.0}) {
        const double tol = 1e-15;
        const auto d = build_distribution(SourceSpec::wcs(mu), tol);
        CHECK(d.mean() <= mu + 1e-15);
        CHECK(d.mean() >= mu - tol * d.cutoff() - 1e-15);
    }
}

TEST_CASE("looser tail tolerance never raises the cutoff") {
    for (double mu : {0.01, 0.1, 0.4, 1.5}) {
        int previous = 1 << 20;
        for (double tol : {1e-16, 1e-15, 1e-13, 1e-10, 1e-8, 1e-6}) {
            const auto d = build_distribution(SourceSpec::wcs(mu), tol);
            CHECK(d.cutoff() <= previous);
            previous = d.cutoff();
        }
    }
}

TEST_CASE("invalid source specs") {
    CHECK_THROWS_AS(build_distribution(SourceSpec::wcs(-0.1)), DomainError);
    CHECK_THROWS_AS(build_distribution(SourceSpec::nonideal_css(0.1, 1.5)), DomainError);
    CHECK_THROWS_AS(build_distribution({SourceKind::css, 0.1, 0.5}), DomainError);
    CHECK_THROWS_AS(build_distribution(SourceSpec::css(0.1), 1e-3), DomainError);
    CHECK_THROWS_AS(build_distribution(SourceSpec::wcs(40.0)), PreconditionError);
    CHECK_THROWS_AS(PhotonDistribution::from_probabilities({0.6, 0.6}), DomainError);
}

TEST_CASE("source kind names round-trip") {
    for (auto kind : {SourceKind::css, SourceKind::nonideal_css, SourceKind::wcs, SourceKind::sps, SourceKind::vacuum})
        CHECK(parse_source_kind(to_string(kind)) == kind);
    CHECK_FALSE(parse_source_kind("laser").has_value());
}

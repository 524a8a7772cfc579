#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fhenon/analysis.hpp"
#include "fhenon/dynamics.hpp"
#include "fhenon/fir_design.hpp"
#include "oracles.hpp"

using namespace fhenon;
using dynamics::FilteredHenonSystem;
using dynamics::State;
using std::numbers::pi;

namespace {

State near_plus(const FilteredHenonSystem& sys, double offset = 1e-3) {
    State x = sys.fixed_points().plus;
    x[0] += offset;
    return x;
}

}  // namespace

TEST_CASE("spectral_radius: diagonal and known cases") {
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 0.5;
    diag(1, 1) = -0.9;
    const auto report = analysis::spectral_radius(diag);
    CHECK(report.spectral_radius == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(report.stable);

    // classic map at p1+: roots of l^2 + 2 p l - beta = 0
    const FilteredHenonSystem classic({}, {1.0, 0.0});
    const auto fp = classic.fixed_points();
    const auto at_plus = analysis::spectral_radius(classic.jacobian_at(fp.plus));
    CHECK(at_plus.spectral_radius ==
          doctest::Approx(1.9237388581534072).epsilon(1e-8));
    CHECK_FALSE(at_plus.stable);
}

TEST_CASE("spectral_radius: p- of the pi/2 notch is unstable") {
    const FilteredHenonSystem sys(
        {}, fir::make_prototype(fir::Notch{pi / 2.0, 1.0}));
    const auto fp = sys.fixed_points();
    REQUIRE(fp.minus.has_value());
    CHECK(analysis::spectral_radius(sys.jacobian_at(*fp.minus)).spectral_radius >
          1.0);
}

TEST_CASE("spectral_radius: transpose invariance and guards") {
    const FilteredHenonSystem sys(
        {}, fir::make_prototype(fir::EquallySpaced{7, 0.8}));
    const auto jac = sys.jacobian_at(near_plus(sys));
    const double a = analysis::spectral_radius(jac).spectral_radius;
    const double b =
        analysis::spectral_radius(jac.transpose().eval()).spectral_radius;
    CHECK(a == doctest::Approx(b).epsilon(1e-8));

    CHECK_THROWS_AS(analysis::spectral_radius(Eigen::MatrixXd::Zero(2, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(analysis::spectral_radius(Eigen::MatrixXd::Zero(65, 65)),
                    std::invalid_argument);
}

TEST_CASE("lyapunov: chaotic baseline agrees with the two-orbit oracle") {
    const FilteredHenonSystem classic({}, {1.0, 0.0});
    const auto est =
        analysis::lyapunov_largest(classic, {0.0, 0.0}, 100000, 500);
    REQUIRE_FALSE(est.diverged);
    CHECK(*est.lambda == doctest::Approx(0.419).epsilon(0.05));
    const double benettin =
        oracles::benettin_lambda(classic, {0.0, 0.0}, 100000, 500);
    CHECK(*est.lambda == doctest::Approx(benettin).epsilon(0.02));
}

TEST_CASE("lyapunov: sign matches the attractor type") {
    const FilteredHenonSystem stable(
        {}, fir::make_prototype(fir::EquallySpaced{15, 0.5}));
    const auto est_stable =
        analysis::lyapunov_largest(stable, near_plus(stable));
    REQUIRE_FALSE(est_stable.diverged);
    CHECK(*est_stable.lambda < 0.0);

    const FilteredHenonSystem chaotic(
        {}, fir::make_prototype(fir::EquallySpaced{15, 1.0}));
    const auto est_chaotic =
        analysis::lyapunov_largest(chaotic, near_plus(chaotic));
    REQUIRE_FALSE(est_chaotic.diverged);
    CHECK(*est_chaotic.lambda > 0.0);
}

TEST_CASE("lyapunov: divergence is flagged, never silently numeric") {
    const FilteredHenonSystem sys(
        {}, fir::make_prototype(fir::Notch{pi / 2.0, 1.2}));
    const auto est = analysis::lyapunov_largest(sys, near_plus(sys));
    CHECK(est.diverged);
    CHECK_FALSE(est.lambda.has_value());
    REQUIRE(est.escape_index.has_value());
    CHECK(*est.escape_index < 3000);
}

TEST_CASE("lyapunov: renormalization schedule independence") {
    const FilteredHenonSystem classic({}, {1.0, 0.0});
    const auto every_step =
        analysis::lyapunov_largest(classic, {0.0, 0.0}, 20000, 500, 1);
    const auto every_five =
        analysis::lyapunov_largest(classic, {0.0, 0.0}, 20000, 500, 5);
    CHECK(*every_step.lambda ==
          doctest::Approx(*every_five.lambda).epsilon(1e-3));

    const FilteredHenonSystem periodic(
        {}, fir::make_prototype(fir::Notch{pi / 2.0, 0.65}));
    const auto p1 = analysis::lyapunov_largest(periodic, near_plus(periodic),
                                               3000, 500, 1);
    const auto p5 = analysis::lyapunov_largest(periodic, near_plus(periodic),
                                               3000, 500, 5);
    CHECK(std::abs(*p1.lambda - *p5.lambda) < 1e-3);
}

TEST_CASE("lyapunov: contraction toward p+ is bounded by the eigenvalue") {
    const FilteredHenonSystem sys(
        {}, fir::make_prototype(fir::Notch{pi / 2.0, 0.3}));
    const auto fp = sys.fixed_points();
    const double radius =
        analysis::spectral_radius(sys.jacobian_at(fp.plus)).spectral_radius;
    const auto est = analysis::lyapunov_largest(sys, near_plus(sys));
    REQUIRE_FALSE(est.diverged);
    CHECK(*est.lambda <= std::log(radius) + 1e-2);
}

TEST_CASE("lyapunov: bit-identical across repeated runs") {
    const FilteredHenonSystem sys(
        {}, fir::make_prototype(fir::EquallySpaced{6, 0.9}));
    const auto a = analysis::lyapunov_largest(sys, near_plus(sys));
    const auto b = analysis::lyapunov_largest(sys, near_plus(sys));
    CHECK(*a.lambda == *b.lambda);
    CHECK(a.n_used == b.n_used);
}

TEST_CASE("psd: spectral concentration and broadband shapes") {
    SUBCASE("pure sinusoid concentrates at its frequency") {
        std::vector<double> samples(2048);
        for (std::size_t n = 0; n < samples.size(); ++n)
            samples[n] = std::sin(0.3 * pi * static_cast<double>(n));
        const auto est = analysis::psd_estimate(samples);
        std::size_t peak = 0;
        for (std::size_t k = 1; k < est.power_db.size(); ++k)
            if (est.power_db[k] > est.power_db[peak]) peak = k;
        const double bin = est.frequencies[1] - est.frequencies[0];
        CHECK(std::abs(est.frequencies[peak] - 0.3 * pi) <= bin + 1e-12);
    }
    SUBCASE("a period-2 orbit peaks at the Nyquist frequency") {
        std::vector<double> samples(1024);
        for (std::size_t n = 0; n < samples.size(); ++n)
            samples[n] = (n % 2 == 0) ? 1.3 : -0.7;
        const auto est = analysis::psd_estimate(samples);
        std::size_t peak = 0;
        for (std::size_t k = 1; k < est.power_db.size(); ++k)
            if (est.power_db[k] > est.power_db[peak]) peak = k;
        CHECK(est.frequencies[peak] == doctest::Approx(pi));
    }
    SUBCASE("the chaotic orbit is broadband") {
        const FilteredHenonSystem classic({}, {1.0, 0.0});
        const auto orbit = classic.iterate({0.0, 0.0}, 4595);
        REQUIRE_FALSE(orbit.diverged);
        std::vector<double> samples;
        for (std::size_t k = 500; k < orbit.states.size(); ++k)
            samples.push_back(orbit.states[k][0]);
        const auto est = analysis::psd_estimate(samples);
        std::vector<double> sorted = est.power_db;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        CHECK(0.0 - median < 30.0);  // peak is normalized to 0 dB
    }
    SUBCASE("frequencies are strictly increasing over [0, pi]") {
        std::vector<double> samples(512, 0.0);
        samples[0] = 1.0;
        const auto est = analysis::psd_estimate(samples);
        REQUIRE(est.frequencies.size() == est.power_db.size());
        CHECK(est.frequencies.front() == 0.0);
        CHECK(est.frequencies.back() == doctest::Approx(pi));
        for (std::size_t k = 1; k < est.frequencies.size(); ++k)
            CHECK(est.frequencies[k] > est.frequencies[k - 1]);
    }
    SUBCASE("too-short input is rejected") {
        CHECK_THROWS_AS(analysis::psd_estimate(std::vector<double>(511, 0.0)),
                        std::invalid_argument);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fhenon/analysis.hpp"
#include "fhenon/sweep.hpp"
#include "oracles.hpp"

using namespace fhenon;
using dynamics::State;
using std::numbers::pi;
using sweep::Experiment;
using sweep::OrbitClass;

namespace {

bool same_cell(const sweep::CellResult& a, const sweep::CellResult& b) {
    if (a.orbit_class != b.orbit_class) return false;
    if (a.spectral_radius != b.spectral_radius) return false;
    if (a.n_diverged != b.n_diverged) return false;
    if (a.lambda_avg.has_value() != b.lambda_avg.has_value()) return false;
    if (a.lambda_avg && *a.lambda_avg != *b.lambda_avg) return false;
    return true;
}

}  // namespace

TEST_CASE("sample_initial_conditions: ball membership and determinism") {
    const State center{1.0, -0.5, 2.0, 0.25};
    const auto points = sweep::sample_initial_conditions(center, 0.01, 25, 9);
    REQUIRE(points.size() == 25);
    for (const auto& p : points) {
        double dist_sq = 0.0;
        for (std::size_t k = 0; k < center.size(); ++k)
            dist_sq += (p[k] - center[k]) * (p[k] - center[k]);
        CHECK(std::sqrt(dist_sq) <= 0.01);
    }

    const auto again = sweep::sample_initial_conditions(center, 0.01, 25, 9);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < center.size(); ++k)
            CHECK(points[i][k] == again[i][k]);

    const auto other = sweep::sample_initial_conditions(center, 0.01, 25, 10);
    bool any_difference = false;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < center.size(); ++k)
            if (points[i][k] != other[i][k]) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("sample_initial_conditions: empirical mean sits on the center") {
    const State center{0.5, -1.0, 0.75};
    const auto points =
        sweep::sample_initial_conditions(center, 0.01, 100000, 123);
    for (std::size_t k = 0; k < center.size(); ++k) {
        double mean = 0.0;
        for (const auto& p : points) mean += p[k];
        mean /= static_cast<double>(points.size());
        CHECK(std::abs(mean - center[k]) < 2e-4);
    }
}

TEST_CASE("classify_cell: the three notch regimes at w0 = pi/2") {
    const sweep::Protocol protocol;
    const auto fixed = sweep::classify_cell(
        sweep::cell_system(Experiment::II, 0.5, 0.3, {}), protocol, 42);
    CHECK(fixed.orbit_class == OrbitClass::StableFixedPoint);
    CHECK(fixed.spectral_radius < 1.0);
    CHECK_FALSE(fixed.lambda_avg.has_value());
    CHECK(fixed.n_diverged == 0);

    const auto periodic = sweep::classify_cell(
        sweep::cell_system(Experiment::II, 0.5, 0.65, {}), protocol, 42);
    CHECK(periodic.orbit_class == OrbitClass::Periodic);
    REQUIRE(periodic.lambda_avg.has_value());
    CHECK(*periodic.lambda_avg < 0.0);
    CHECK(periodic.lambda_per_ic.size() == 25);

    const auto divergent = sweep::classify_cell(
        sweep::cell_system(Experiment::II, 0.5, 1.2, {}), protocol, 42);
    CHECK(divergent.orbit_class == OrbitClass::Divergent);
    CHECK(divergent.n_diverged > 0);
    CHECK_FALSE(divergent.lambda_avg.has_value());
}

TEST_CASE("experiment I and II agree where the filters coincide") {
    const sweep::Protocol protocol;
    for (double g : {0.3, 0.65, 1.0, 1.2}) {
        const auto via_i = sweep::cell_system(Experiment::I, g, 2.0, {});
        const auto via_ii = sweep::cell_system(Experiment::II, 0.5, g, {});
        REQUIRE(via_i.coefficients().size() == via_ii.coefficients().size());
        for (std::size_t k = 0; k < via_i.coefficients().size(); ++k)
            CHECK(via_i.coefficients()[k] == via_ii.coefficients()[k]);
        CHECK(same_cell(sweep::classify_cell(via_i, protocol, 1234),
                        sweep::classify_cell(via_ii, protocol, 1234)));
    }
}

TEST_CASE("grid_values: counts and endpoints") {
    CHECK(sweep::grid_values(0.0, 1.3, 0.01).size() == 131);
    CHECK(sweep::grid_values(1.0, 20.0, 1.0).size() == 20);
    CHECK(sweep::grid_values(0.05, 1.0, 0.01).size() == 96);
    const auto single = sweep::grid_values(0.7, 0.7, 0.1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 0.7);
    CHECK_THROWS_AS(sweep::grid_values(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sweep::grid_values(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("run_experiment: deterministic, worker-count independent, exhaustive") {
    sweep::ExperimentConfig cfg = sweep::default_config(Experiment::II);
    cfg.axis1_min = 0.4;
    cfg.axis1_max = 0.6;
    cfg.axis1_step = 0.1;
    cfg.axis2_min = 0.0;
    cfg.axis2_max = 1.3;
    cfg.axis2_step = 0.13;
    cfg.rng_seed = 42;

    cfg.workers = 2;
    const auto grid = sweep::run_experiment(cfg);
    REQUIRE(grid.size() == 3 * 11);

    // row-major ordering with axis1 outer
    CHECK(grid[0].axis1 == 0.4);
    CHECK(grid[0].axis2 == 0.0);
    CHECK(grid[11].axis1 == doctest::Approx(0.5));
    CHECK(grid.back().axis1 == doctest::Approx(0.6));

    for (const auto& cell : grid) {
        REQUIRE_FALSE(cell.error.has_value());
        // exactly one class, and divergent cells never carry an average
        if (cell.orbit_class == OrbitClass::Divergent) {
            CHECK(cell.n_diverged > 0);
            CHECK_FALSE(cell.lambda_avg.has_value());
        }
        if (cell.orbit_class == OrbitClass::StableFixedPoint)
            CHECK(cell.spectral_radius < 1.0);
        if (cell.orbit_class == OrbitClass::Periodic ||
            cell.orbit_class == OrbitClass::Chaotic) {
            REQUIRE(cell.lambda_avg.has_value());
            CHECK(cell.n_diverged == 0);
        }
    }

    const auto repeat = sweep::run_experiment(cfg);
    cfg.workers = 1;
    const auto serial = sweep::run_experiment(cfg);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(same_cell(grid[k], repeat[k]));
        CHECK(same_cell(grid[k], serial[k]));
    }
}

TEST_CASE("run_experiment: per-cell failures stay in the grid") {
    sweep::ExperimentConfig cfg = sweep::default_config(Experiment::V);
    cfg.axis1_min = 1.0;
    cfg.axis1_max = 2.0;
    cfg.axis1_step = 1.0;
    cfg.axis2_min = 0.0;  // wc = 0 is invalid for the hamming design
    cfg.axis2_max = 0.2;
    cfg.axis2_step = 0.2;
    const auto grid = sweep::run_experiment(cfg);
    REQUIRE(grid.size() == 4);
    int failures = 0;
    for (const auto& cell : grid)
        if (cell.error.has_value()) ++failures;
    CHECK(failures == 2);  // the wc = 0 column
    CHECK_FALSE(grid[1].error.has_value());
}

TEST_CASE("stable cells audited against direct simulation") {
    // Coarse stable region of the notch experiment; every audited cell must
    // actually pull the sampled initial conditions onto p+.
    sweep::ExperimentConfig cfg = sweep::default_config(Experiment::II);
    cfg.axis1_min = 0.3;
    cfg.axis1_max = 0.9;
    cfg.axis1_step = 0.1;
    cfg.axis2_min = 0.0;
    cfg.axis2_max = 0.5;
    cfg.axis2_step = 0.05;
    const auto grid = sweep::run_experiment(cfg);

    std::vector<std::size_t> stable_cells;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (!grid[k].error &&
            grid[k].orbit_class == OrbitClass::StableFixedPoint)
            stable_cells.push_back(k);
    REQUIRE(stable_cells.size() > 20);

    std::mt19937_64 audit_rng(7);
    std::shuffle(stable_cells.begin(), stable_cells.end(), audit_rng);
    const std::size_t audit_count =
        std::max<std::size_t>(1, stable_cells.size() / 20);  // 5% audit
    const auto n2 = sweep::grid_values(cfg.axis2_min, cfg.axis2_max,
                                       cfg.axis2_step).size();
    for (std::size_t a = 0; a < audit_count; ++a) {
        const std::size_t flat = stable_cells[a];
        const auto& cell = grid[flat];
        const auto sys =
            sweep::cell_system(cfg.experiment, cell.axis1, cell.axis2, {});
        const auto fp = sys.fixed_points();
        const auto seed =
            sweep::cell_seed(cfg.rng_seed, static_cast<int>(flat / n2),
                             static_cast<int>(flat % n2));
        const auto ics = sweep::sample_initial_conditions(
            fp.plus, cfg.protocol.ic_radius, cfg.protocol.n_ic, seed);
        for (const auto& ic : ics) {
            State x = ic;
            double best = 1e300;
            for (int n = 0; n < cfg.protocol.n_total && best >= 1e-6; ++n) {
                x = sys.step(x);
                double worst = 0.0;
                for (std::size_t k = 0; k < x.size(); ++k)
                    worst = std::max(worst, std::abs(x[k] - fp.plus[k]));
                best = std::min(best, worst);
            }
            CHECK(best < 1e-6);
        }
    }
}

TEST_CASE("bifurcation_diagram: cascade at the pi/2 notch") {
    const auto unit = fir::make_prototype(fir::Notch{pi / 2.0, 1.0});
    const auto points = sweep::bifurcation_diagram(unit, {}, 0.4, 1.0, 0.01);
    REQUIRE(points.size() == 61);

    const auto& at_04 = points.front();
    REQUIRE_FALSE(at_04.diverged);
    REQUIRE(at_04.samples.size() == 200);
    CHECK(oracles::count_clusters(at_04.samples) == 1);
    const double p_plus = dynamics::fixed_point_coordinates({}, 0.4).first;
    for (double s : at_04.samples) CHECK(std::abs(s - p_plus) < 1e-6);

    const auto& at_065 = points[25];
    CHECK(at_065.gain == doctest::Approx(0.65));
    REQUIRE_FALSE(at_065.diverged);
    CHECK(oracles::count_clusters(at_065.samples) == 2);

    const auto& at_10 = points.back();
    REQUIRE_FALSE(at_10.diverged);
    CHECK(oracles::count_clusters(at_10.samples) > 50);
}

TEST_CASE("bifurcation_diagram: divergent points are flagged and restarted") {
    const auto unit = fir::make_prototype(fir::Notch{pi / 2.0, 1.0});
    const auto points = sweep::bifurcation_diagram(unit, {}, 1.0, 1.3, 0.05);
    bool any_diverged = false;
    for (const auto& p : points) {
        if (p.diverged) {
            any_diverged = true;
            CHECK(p.samples.empty());
        } else {
            for (double s : p.samples) CHECK(std::isfinite(s));
        }
    }
    CHECK(any_diverged);
    CHECK(points.back().diverged);  // G = 1.3 is far past the escape gain
}

TEST_CASE("cell_seed: distinct cells get distinct streams") {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j)
            seen.insert(sweep::cell_seed(42, i, j));
    CHECK(seen.size() == 1600);
    CHECK(sweep::cell_seed(42, 3, 5) != sweep::cell_seed(43, 3, 5));
    CHECK(sweep::cell_seed(42, 3, 5) == sweep::cell_seed(42, 3, 5));
}

TEST_CASE("default configs match the documented grids") {
    const auto one = sweep::default_config(Experiment::I);
    CHECK(sweep::grid_values(one.axis1_min, one.axis1_max, one.axis1_step)
              .size() == 301);
    CHECK(sweep::grid_values(one.axis2_min, one.axis2_max, one.axis2_step)
              .size() == 20);
    const auto five = sweep::default_config(Experiment::V);
    CHECK(sweep::grid_values(five.axis1_min, five.axis1_max, five.axis1_step)
              .size() == 40);
    CHECK(sweep::grid_values(five.axis2_min, five.axis2_max, five.axis2_step)
              .size() == 91);
    CHECK(sweep::axis_names(Experiment::V).second == "wc_over_pi");
}

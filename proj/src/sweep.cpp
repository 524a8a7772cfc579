#include "fhenon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "fhenon/analysis.hpp"

namespace fhenon::sweep {

using std::numbers::pi;

std::string_view to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::StableFixedPoint: return "fixed";
        case OrbitClass::Periodic: return "periodic";
        case OrbitClass::Chaotic: return "chaotic";
        case OrbitClass::Divergent: return "divergent";
    }
    return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
    if (name == "I") return Experiment::I;
    if (name == "II") return Experiment::II;
    if (name == "III") return Experiment::III;
    if (name == "IV") return Experiment::IV;
    if (name == "V") return Experiment::V;
    throw std::invalid_argument("unknown experiment: " + std::string(name));
}

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::I: return "I";
        case Experiment::II: return "II";
        case Experiment::III: return "III";
        case Experiment::IV: return "IV";
        case Experiment::V: return "V";
    }
    return "?";
}

std::vector<dynamics::State> sample_initial_conditions(
    const dynamics::State& center, double radius, int n, std::uint64_t seed) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    if (n < 1) throw std::invalid_argument("need at least one sample");

    const std::size_t d = center.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<dynamics::State> points;
    points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        dynamics::State dir(d);
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                dir[k] = gauss(rng);
                norm_sq += dir[k] * dir[k];
            }
        } while (norm_sq == 0.0);
        const double r =
            radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
        const double scale = r / std::sqrt(norm_sq);
        dynamics::State p(d);
        for (std::size_t k = 0; k < d; ++k) p[k] = center[k] + scale * dir[k];
        points.push_back(std::move(p));
    }
    return points;
}

CellResult classify_cell(const dynamics::FilteredHenonSystem& sys,
                         const Protocol& protocol, std::uint64_t seed) {
    CellResult cell;
    const dynamics::FixedPoints fp = sys.fixed_points();
    const analysis::StabilityReport stability =
        analysis::spectral_radius(sys.jacobian_at(fp.plus));
    cell.spectral_radius = stability.spectral_radius;
    if (stability.stable) {
        cell.orbit_class = OrbitClass::StableFixedPoint;
        return cell;
    }

    const auto ics = sample_initial_conditions(fp.plus, protocol.ic_radius,
                                               protocol.n_ic, seed);
    cell.lambda_per_ic.reserve(ics.size());
    double sum = 0.0;
    for (const auto& ic : ics) {
        const analysis::LyapunovEstimate est = analysis::lyapunov_largest(
            sys, ic, protocol.n_total, protocol.n_transient);
        if (est.diverged) {
            ++cell.n_diverged;
            cell.lambda_per_ic.push_back(
                std::numeric_limits<double>::quiet_NaN());
        } else {
            cell.lambda_per_ic.push_back(*est.lambda);
            sum += *est.lambda;
        }
    }
    if (cell.n_diverged > 0) {
        cell.orbit_class = OrbitClass::Divergent;
        return cell;
    }
    cell.lambda_avg = sum / static_cast<double>(protocol.n_ic);
    cell.orbit_class = *cell.lambda_avg > 0.0 ? OrbitClass::Chaotic
                                              : OrbitClass::Periodic;
    return cell;
}

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig cfg;
    cfg.experiment = e;
    switch (e) {
        case Experiment::I:
            cfg.axis1_min = 0.0; cfg.axis1_max = 1.5; cfg.axis1_step = 0.005;
            cfg.axis2_min = 1.0; cfg.axis2_max = 20.0; cfg.axis2_step = 1.0;
            break;
        case Experiment::II:
        case Experiment::III:
            cfg.axis1_min = 0.05; cfg.axis1_max = 1.0; cfg.axis1_step = 0.01;
            cfg.axis2_min = 0.0; cfg.axis2_max = 1.5; cfg.axis2_step = 0.005;
            break;
        case Experiment::IV:
            cfg.axis1_min = 1.0; cfg.axis1_max = 20.0; cfg.axis1_step = 1.0;
            cfg.axis2_min = 0.0; cfg.axis2_max = 1.5; cfg.axis2_step = 0.005;
            break;
        case Experiment::V:
            cfg.axis1_min = 1.0; cfg.axis1_max = 40.0; cfg.axis1_step = 1.0;
            cfg.axis2_min = 0.05; cfg.axis2_max = 0.95; cfg.axis2_step = 0.01;
            break;
    }
    return cfg;
}

std::pair<std::string, std::string> axis_names(Experiment e) {
    switch (e) {
        case Experiment::I: return {"G", "Nz"};
        case Experiment::II:
        case Experiment::III: return {"w0_over_pi", "G"};
        case Experiment::IV: return {"Nz", "G"};
        case Experiment::V: return {"Nz", "wc_over_pi"};
    }
    return {"axis1", "axis2"};
}

std::vector<double> grid_values(double min, double max, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (max < min) throw std::invalid_argument("empty grid range");
    const int count = static_cast<int>(std::floor((max - min) / step + 0.5)) + 1;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double v = min + step * k;
        if (v > max + 1e-6 * step) break;
        values.push_back(v);
    }
    return values;
}

namespace {

int rounded_count(double v, const char* what) {
    const int n = static_cast<int>(std::lround(v));
    if (n < 1 || std::abs(v - n) > 1e-9)
        throw std::invalid_argument(std::string(what) +
                                    " axis must hold integers >= 1");
    return n;
}

std::vector<double> scaled(const std::vector<double>& unit, double gain) {
    std::vector<double> taps(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) taps[i] = gain * unit[i];
    return taps;
}

}  // namespace

dynamics::FilteredHenonSystem cell_system(Experiment e, double axis1,
                                          double axis2,
                                          const dynamics::MapParams& params) {
    switch (e) {
        case Experiment::I: {
            const int nz = rounded_count(axis2, "Nz");
            const auto unit =
                fir::make_prototype(fir::EquallySpaced{nz, 1.0});
            return {params, scaled(unit.taps, axis1)};
        }
        case Experiment::II: {
            const auto unit =
                fir::make_prototype(fir::Notch{axis1 * pi, 1.0});
            return {params, scaled(unit.taps, axis2)};
        }
        case Experiment::III: {
            const auto unit =
                fir::make_prototype(fir::NotchPlusNyquist{axis1 * pi, 1.0});
            return {params, scaled(unit.taps, axis2)};
        }
        case Experiment::IV: {
            const int nz = rounded_count(axis1, "Nz");
            const auto unit =
                fir::make_prototype(fir::RepeatedNyquist{nz, 1.0});
            return {params, scaled(unit.taps, axis2)};
        }
        case Experiment::V: {
            const int nz = rounded_count(axis1, "Nz");
            return {params,
                    fir::make_prototype(fir::HammingLowpass{nz, axis2 * pi})};
        }
    }
    throw std::invalid_argument("unknown experiment");
}

std::uint64_t cell_seed(std::uint64_t rng_seed, int i, int j) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(rng_seed);
    s = mix(s ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)));
    s = mix(s ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)) << 32));
    return s;
}

std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
    const auto axis1 = grid_values(cfg.axis1_min, cfg.axis1_max, cfg.axis1_step);
    const auto axis2 = grid_values(cfg.axis2_min, cfg.axis2_max, cfg.axis2_step);
    const std::size_t n1 = axis1.size(), n2 = axis2.size();
    const std::size_t total = n1 * n2;

    std::vector<CellResult> grid(total);

    auto evaluate = [&](std::size_t flat) {
        const std::size_t i = flat / n2, j = flat % n2;
        CellResult& cell = grid[flat];
        cell.axis1 = axis1[i];
        cell.axis2 = axis2[j];
        try {
            const auto sys =
                cell_system(cfg.experiment, axis1[i], axis2[j], cfg.params);
            const std::uint64_t seed = cell_seed(
                cfg.rng_seed, static_cast<int>(i), static_cast<int>(j));
            const double a1 = cell.axis1, a2 = cell.axis2;
            cell = classify_cell(sys, cfg.protocol, seed);
            cell.axis1 = a1;
            cell.axis2 = a2;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    };

    int workers = cfg.workers;
    if (workers <= 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1 || total <= 1) {
        for (std::size_t k = 0; k < total; ++k) evaluate(k);
        return grid;
    }

    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t k = next.fetch_add(1); k < total;
             k = next.fetch_add(1))
            evaluate(k);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    return grid;
}

std::vector<BifurcationPoint> bifurcation_diagram(
    const fir::FirCoefficients& unit_gain_taps,
    const dynamics::MapParams& params, double g_min, double g_max,
    double g_step, int n_total, int n_keep) {
    if (n_keep < 1 || n_total < n_keep)
        throw std::invalid_argument("need n_total >= n_keep >= 1");

    const auto gains = grid_values(g_min, g_max, g_step);
    std::vector<BifurcationPoint> points;
    points.reserve(gains.size());

    std::optional<dynamics::State> carried;  // attractor following
    for (double g : gains) {
        const dynamics::FilteredHenonSystem sys(params,
                                                scaled(unit_gain_taps.taps, g));
        dynamics::State x;
        if (carried.has_value()) {
            x = *carried;
        } else {
            x = sys.fixed_points().plus;
            x[0] += 1e-3;
        }

        BifurcationPoint point;
        point.gain = g;
        std::vector<double> kept;
        kept.reserve(static_cast<std::size_t>(n_keep));
        for (int n = 0; n < n_total; ++n) {
            if (dynamics::escaped(x)) {
                point.diverged = true;
                break;
            }
            x = sys.step(x);
            if (n >= n_total - n_keep) kept.push_back(x[0]);
        }
        if (point.diverged || dynamics::escaped(x)) {
            point.diverged = true;
            point.samples.clear();
            carried.reset();  // restart the next gain from its own p+
        } else {
            point.samples = std::move(kept);
            carried = x;
        }
        points.push_back(std::move(point));
    }
    return points;
}

}  // namespace fhenon::sweep

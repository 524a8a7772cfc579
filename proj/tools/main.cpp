// Command-line front end: filter inspection, orbit dumps, Lyapunov
// estimates, cell classification, experiment sweeps, bifurcation diagrams
// and PSD estimates, all emitting plot-ready CSV.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "csv_io.hpp"
#include "fhenon/analysis.hpp"
#include "fhenon/dynamics.hpp"
#include "fhenon/fir_design.hpp"
#include "fhenon/sweep.hpp"

namespace {

namespace fir = fhenon::fir;
namespace dynamics = fhenon::dynamics;
namespace analysis = fhenon::analysis;
namespace sweep = fhenon::sweep;
using fhenon::cli::ConfigLog;
using fhenon::cli::format_double;
using std::numbers::pi;

constexpr int kFreqGridPoints = 1024;

struct ProtoFlags {
    std::string prototype;
    int nz = 1;
    double w0_over_pi = 0.5;
    double wc_over_pi = 0.5;
    double gain = 1.0;
    bool gain_given = false;
};

void add_prototype_options(CLI::App* sub, ProtoFlags& pf) {
    sub->add_option("--prototype", pf.prototype,
                    "filter family: equally-spaced | notch | notch-nyquist | "
                    "repeated-nyquist | hamming | none")
        ->required()
        ->check(CLI::IsMember({"equally-spaced", "notch", "notch-nyquist",
                               "repeated-nyquist", "hamming", "none"}));
    sub->add_option("--nz", pf.nz, "number of zeros");
    sub->add_option("--w0", pf.w0_over_pi, "notch frequency in units of pi");
    sub->add_option("--wc", pf.wc_over_pi, "cutoff frequency in units of pi");
    auto* g = sub->add_option("--gain", pf.gain, "filter gain G (default 1)");
    sub->parse_complete_callback([&pf, g] { pf.gain_given = g->count() > 0; });
}

/// Taps for the resolved prototype flags, logging the parameters that
/// actually apply to the chosen family.
fir::FirCoefficients resolve_taps(const ProtoFlags& pf, ConfigLog& log) {
    log.add("prototype", pf.prototype);
    if (pf.prototype == "equally-spaced") {
        log.add("nz", pf.nz);
        log.add("gain", pf.gain);
        return fir::make_prototype(fir::EquallySpaced{pf.nz, pf.gain});
    }
    if (pf.prototype == "notch") {
        log.add("w0_over_pi", pf.w0_over_pi);
        log.add("gain", pf.gain);
        return fir::make_prototype(fir::Notch{pf.w0_over_pi * pi, pf.gain});
    }
    if (pf.prototype == "notch-nyquist") {
        log.add("w0_over_pi", pf.w0_over_pi);
        log.add("gain", pf.gain);
        return fir::make_prototype(
            fir::NotchPlusNyquist{pf.w0_over_pi * pi, pf.gain});
    }
    if (pf.prototype == "repeated-nyquist") {
        log.add("nz", pf.nz);
        log.add("gain", pf.gain);
        return fir::make_prototype(fir::RepeatedNyquist{pf.nz, pf.gain});
    }
    if (pf.prototype == "hamming") {
        if (pf.gain_given && pf.gain != 1.0)
            throw std::invalid_argument("the hamming prototype has gain 1");
        log.add("nz", pf.nz);
        log.add("wc_over_pi", pf.wc_over_pi);
        return fir::make_prototype(
            fir::HammingLowpass{pf.nz, pf.wc_over_pi * pi});
    }
    // "none": gain-scaled passthrough, the plain Henon map for gain 1.
    log.add("gain", pf.gain);
    return fir::FirCoefficients{{pf.gain, 0.0}};
}

std::vector<fir::Complex> resolve_zeros(const ProtoFlags& pf,
                                        const fir::FirCoefficients& taps) {
    if (pf.prototype == "equally-spaced")
        return fir::prototype_zeros(fir::EquallySpaced{pf.nz, pf.gain});
    if (pf.prototype == "notch")
        return fir::prototype_zeros(fir::Notch{pf.w0_over_pi * pi, pf.gain});
    if (pf.prototype == "notch-nyquist")
        return fir::prototype_zeros(
            fir::NotchPlusNyquist{pf.w0_over_pi * pi, pf.gain});
    if (pf.prototype == "repeated-nyquist")
        return fir::prototype_zeros(fir::RepeatedNyquist{pf.nz, pf.gain});
    return fir::coefficient_zeros(taps);  // hamming, none
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open output file: " + path.string());
    return os;
}

std::string join_values(const std::vector<double>& vs) {
    std::string s;
    for (double v : vs) {
        if (!s.empty()) s += ';';
        s += format_double(v);
    }
    return s;
}

dynamics::State resolve_x0(const std::vector<double>& flag_x0,
                           const dynamics::FilteredHenonSystem& sys,
                           const dynamics::State& fallback) {
    if (flag_x0.empty()) return fallback;
    if (static_cast<int>(flag_x0.size()) != sys.dimension())
        throw std::invalid_argument(
            "--x0 needs " + std::to_string(sys.dimension()) + " coordinates");
    return flag_x0;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    ProtoFlags proto;
    std::string out_dir = ".";
};

void cmd_filter(const FilterArgs& a) {
    ConfigLog log;
    log.add("subcommand", "filter");
    const fir::FirCoefficients taps = resolve_taps(a.proto, log);
    const auto zeros = resolve_zeros(a.proto, taps);
    const std::filesystem::path dir(a.out_dir);

    auto coeffs = open_output(dir / "coeffs.csv");
    log.write_header(coeffs);
    coeffs << "index,coefficient\n";
    for (std::size_t j = 0; j < taps.taps.size(); ++j)
        coeffs << j << "," << format_double(taps.taps[j]) << "\n";

    // 1024 uniform points with spacing pi/1024; binary fractions like pi/4
    // land exactly on the grid, so designed nulls show up at the dB floor.
    auto freqz = open_output(dir / "freqz.csv");
    log.write_header(freqz);
    freqz << "omega_over_pi,magnitude_db,phase_rad\n";
    for (int i = 0; i < kFreqGridPoints; ++i) {
        const double frac = static_cast<double>(i) / kFreqGridPoints;
        const fir::Complex h = fir::frequency_response(taps, frac * pi);
        freqz << format_double(frac) << "," << format_double(fir::magnitude_db(h))
              << "," << format_double(std::arg(h)) << "\n";
    }

    auto zcsv = open_output(dir / "zeros.csv");
    log.write_header(zcsv);
    zcsv << "re,im\n";
    for (const auto& z : zeros)
        zcsv << format_double(z.real()) << "," << format_double(z.imag()) << "\n";
}

// ----------------------------------------------------------------- orbit

struct OrbitArgs {
    ProtoFlags proto;
    dynamics::MapParams params;
    int n = 1000;
    int transient = 0;
    std::vector<double> x0;
    std::string out = "orbit.csv";
};

void cmd_orbit(const OrbitArgs& a) {
    ConfigLog log;
    log.add("subcommand", "orbit");
    const fir::FirCoefficients taps = resolve_taps(a.proto, log);
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log.add("n", a.n);
    log.add("transient", a.transient);
    const dynamics::FilteredHenonSystem sys(a.params, taps);
    const dynamics::State x0 = resolve_x0(
        a.x0, sys, dynamics::State(static_cast<std::size_t>(sys.dimension())));
    log.add("x0", join_values(x0));

    const dynamics::Orbit orbit = sys.iterate(x0, a.n);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "n";
    for (int k = 1; k <= sys.dimension(); ++k) os << ",x" << k;
    os << "\n";
    for (std::size_t k = static_cast<std::size_t>(a.transient);
         k < orbit.states.size(); ++k) {
        os << k;
        for (double v : orbit.states[k]) os << "," << format_double(v);
        os << "\n";
    }
    if (orbit.diverged)
        os << "# diverged_at=" << *orbit.escape_index << "\n";
}

// -------------------------------------------------------------- lyapunov

struct LyapunovArgs {
    ProtoFlags proto;
    dynamics::MapParams params;
    int n = 3000;
    int transient = 500;
    std::vector<double> x0;
    std::string out = "lyapunov.csv";
};

void cmd_lyapunov(const LyapunovArgs& a) {
    ConfigLog log;
    log.add("subcommand", "lyapunov");
    const fir::FirCoefficients taps = resolve_taps(a.proto, log);
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log.add("n", a.n);
    log.add("transient", a.transient);
    const dynamics::FilteredHenonSystem sys(a.params, taps);
    dynamics::State fallback = sys.fixed_points().plus;
    fallback[0] += 1e-3;
    const dynamics::State x0 = resolve_x0(a.x0, sys, fallback);
    log.add("x0", join_values(x0));

    const analysis::LyapunovEstimate est =
        analysis::lyapunov_largest(sys, x0, a.n, a.transient);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "lambda,n_used,diverged,escape_index\n";
    os << (est.lambda ? format_double(*est.lambda) : "") << "," << est.n_used
       << "," << (est.diverged ? 1 : 0) << ","
       << (est.escape_index ? std::to_string(*est.escape_index) : "") << "\n";
}

// ---------------------------------------------------------- fixed-points

struct FixedPointArgs {
    dynamics::MapParams params;
    double g_min = -2.0, g_max = 2.0, g_step = 0.01;
    std::string out = "fixed_points.csv";
};

void cmd_fixed_points(const FixedPointArgs& a) {
    ConfigLog log;
    log.add("subcommand", "fixed-points");
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log.add("g_min", a.g_min);
    log.add("g_max", a.g_max);
    log.add("g_step", a.g_step);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "G,p1_plus,p1_minus\n";
    for (double g : sweep::grid_values(a.g_min, a.g_max, a.g_step)) {
        const auto [plus, minus] = dynamics::fixed_point_coordinates(a.params, g);
        os << format_double(g) << "," << format_double(plus) << ","
           << (minus ? format_double(*minus) : "") << "\n";
    }
}

// -------------------------------------------------------------- classify

struct ClassifyArgs {
    ProtoFlags proto;
    dynamics::MapParams params;
    sweep::Protocol protocol;
    std::uint64_t seed = 42;
    std::string out = "classify.csv";
};

void add_protocol_options(CLI::App* sub, sweep::Protocol& p) {
    sub->add_option("--n-total", p.n_total, "iterations per orbit");
    sub->add_option("--n-transient", p.n_transient, "discarded iterations");
    sub->add_option("--n-ic", p.n_ic, "initial conditions per cell");
    sub->add_option("--ic-radius", p.ic_radius, "sampling ball radius");
}

void log_protocol(ConfigLog& log, const sweep::Protocol& p) {
    log.add("n_total", p.n_total);
    log.add("n_transient", p.n_transient);
    log.add("n_ic", p.n_ic);
    log.add("ic_radius", p.ic_radius);
}

void cmd_classify(const ClassifyArgs& a) {
    ConfigLog log;
    log.add("subcommand", "classify");
    const fir::FirCoefficients taps = resolve_taps(a.proto, log);
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log_protocol(log, a.protocol);
    log.add("seed", a.seed);

    const dynamics::FilteredHenonSystem sys(a.params, taps);
    const sweep::CellResult cell = sweep::classify_cell(sys, a.protocol, a.seed);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "spectral_radius,lambda_avg,n_diverged,class\n";
    os << format_double(cell.spectral_radius) << ","
       << (cell.lambda_avg ? format_double(*cell.lambda_avg) : "") << ","
       << cell.n_diverged << "," << sweep::to_string(cell.orbit_class) << "\n";
    if (!cell.lambda_per_ic.empty())
        os << "# lambda_per_ic=" << join_values(cell.lambda_per_ic) << "\n";
}

// ----------------------------------------------------------------- sweep

struct AxisOverride {
    std::optional<double> g_min, g_max, g_step;
    std::optional<double> nz_min, nz_max;
    std::optional<double> w0_min, w0_max, w0_step;
    std::optional<double> wc_min, wc_max, wc_step;
};

struct SweepArgs {
    std::string experiment = "I";
    AxisOverride axes;
    sweep::Protocol protocol;
    dynamics::MapParams params;
    std::uint64_t seed = 42;
    int workers = 0;
    std::string out_dir = ".";
    std::string config_path;
    // which scalar flags were given on the command line (flags beat the file)
    bool experiment_given = false, n_total_given = false,
         n_transient_given = false, n_ic_given = false, ic_radius_given = false,
         seed_given = false, workers_given = false, alpha_given = false,
         beta_given = false;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read config file: " + path);
    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

/// Merges file values into the parsed arguments; anything the command line
/// already set stays as it is.
void apply_config_file(SweepArgs& a) {
    auto kv = read_config_file(a.config_path);
    auto take = [&kv](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::optional<std::string> v = it->second;
        kv.erase(it);
        return v;
    };
    auto as_double = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key " + key +
                                        ": not a number: " + v);
        }
    };
    auto as_ll = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const long long n = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key " + key +
                                        ": not an integer: " + v);
        }
    };
    auto fill_axis = [&](const char* key, std::optional<double>& slot) {
        if (auto v = take(key); v && !slot) slot = as_double(key, *v);
    };
    auto fill_double = [&](const char* key, double& slot, bool given) {
        if (auto v = take(key); v && !given) slot = as_double(key, *v);
    };
    auto fill_int = [&](const char* key, int& slot, bool given) {
        if (auto v = take(key); v && !given)
            slot = static_cast<int>(as_ll(key, *v));
    };

    if (auto v = take("experiment"); v && !a.experiment_given)
        a.experiment = *v;
    fill_axis("g-min", a.axes.g_min);
    fill_axis("g-max", a.axes.g_max);
    fill_axis("g-step", a.axes.g_step);
    fill_axis("nz-min", a.axes.nz_min);
    fill_axis("nz-max", a.axes.nz_max);
    fill_axis("w0-min", a.axes.w0_min);
    fill_axis("w0-max", a.axes.w0_max);
    fill_axis("w0-step", a.axes.w0_step);
    fill_axis("wc-min", a.axes.wc_min);
    fill_axis("wc-max", a.axes.wc_max);
    fill_axis("wc-step", a.axes.wc_step);
    fill_int("n-total", a.protocol.n_total, a.n_total_given);
    fill_int("n-transient", a.protocol.n_transient, a.n_transient_given);
    fill_int("n-ic", a.protocol.n_ic, a.n_ic_given);
    fill_double("ic-radius", a.protocol.ic_radius, a.ic_radius_given);
    if (auto v = take("seed"); v && !a.seed_given)
        a.seed = static_cast<std::uint64_t>(as_ll("seed", *v));
    fill_int("workers", a.workers, a.workers_given);
    fill_double("alpha", a.params.alpha, a.alpha_given);
    fill_double("beta", a.params.beta, a.beta_given);
    if (!kv.empty())
        throw std::invalid_argument("unknown config key: " + kv.begin()->first);
}

void apply_axis_overrides(sweep::ExperimentConfig& cfg, const AxisOverride& ax) {
    using sweep::Experiment;
    auto set = [](double& dst, const std::optional<double>& src) {
        if (src) dst = *src;
    };
    const bool g_on_axis1 = cfg.experiment == Experiment::I;
    const bool g_on_axis2 = cfg.experiment == Experiment::II ||
                            cfg.experiment == Experiment::III ||
                            cfg.experiment == Experiment::IV;
    const bool nz_on_axis1 = cfg.experiment == Experiment::IV ||
                             cfg.experiment == Experiment::V;
    const bool w0_used = cfg.experiment == Experiment::II ||
                         cfg.experiment == Experiment::III;

    if ((ax.g_min || ax.g_max || ax.g_step) && !(g_on_axis1 || g_on_axis2))
        throw std::invalid_argument("--g-* does not apply to experiment V");
    if ((ax.nz_min || ax.nz_max) && !(nz_on_axis1 || g_on_axis1))
        throw std::invalid_argument("--nz-* applies to experiments I, IV, V");
    if ((ax.w0_min || ax.w0_max || ax.w0_step) && !w0_used)
        throw std::invalid_argument("--w0-* applies to experiments II and III");
    if ((ax.wc_min || ax.wc_max || ax.wc_step) &&
        cfg.experiment != Experiment::V)
        throw std::invalid_argument("--wc-* applies to experiment V");

    if (g_on_axis1) {
        set(cfg.axis1_min, ax.g_min);
        set(cfg.axis1_max, ax.g_max);
        set(cfg.axis1_step, ax.g_step);
        set(cfg.axis2_min, ax.nz_min);
        set(cfg.axis2_max, ax.nz_max);
    } else if (g_on_axis2) {
        set(cfg.axis2_min, ax.g_min);
        set(cfg.axis2_max, ax.g_max);
        set(cfg.axis2_step, ax.g_step);
        set(cfg.axis1_min, nz_on_axis1 ? ax.nz_min : ax.w0_min);
        set(cfg.axis1_max, nz_on_axis1 ? ax.nz_max : ax.w0_max);
        if (!nz_on_axis1) set(cfg.axis1_step, ax.w0_step);
    } else {  // experiment V
        set(cfg.axis1_min, ax.nz_min);
        set(cfg.axis1_max, ax.nz_max);
        set(cfg.axis2_min, ax.wc_min);
        set(cfg.axis2_max, ax.wc_max);
        set(cfg.axis2_step, ax.wc_step);
    }
}

void cmd_sweep(SweepArgs a) {
    if (!a.config_path.empty()) apply_config_file(a);
    sweep::ExperimentConfig cfg =
        sweep::default_config(sweep::experiment_from_string(a.experiment));
    apply_axis_overrides(cfg, a.axes);
    cfg.protocol = a.protocol;
    cfg.params = a.params;
    cfg.rng_seed = a.seed;
    cfg.workers = a.workers;

    const auto [axis1_name, axis2_name] = sweep::axis_names(cfg.experiment);
    ConfigLog log;
    log.add("subcommand", "sweep");
    log.add("experiment", std::string(sweep::to_string(cfg.experiment)));
    log.add("axis1_min", cfg.axis1_min);
    log.add("axis1_max", cfg.axis1_max);
    log.add("axis1_step", cfg.axis1_step);
    log.add("axis2_min", cfg.axis2_min);
    log.add("axis2_max", cfg.axis2_max);
    log.add("axis2_step", cfg.axis2_step);
    log.add("alpha", cfg.params.alpha);
    log.add("beta", cfg.params.beta);
    log_protocol(log, cfg.protocol);
    log.add("seed", cfg.rng_seed);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<sweep::CellResult> grid = sweep::run_experiment(cfg);
    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    const std::filesystem::path dir(a.out_dir);
    auto os = open_output(dir / "grid.csv");
    log.write_header(os);
    os << "# axes: axis1=" << axis1_name << " axis2=" << axis2_name << "\n";
    os << "axis1,axis2,spectral_radius,lambda_avg,n_diverged,class\n";
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& cell : grid) {
        if (cell.error) {
            failures.push_back({{"axis1", cell.axis1},
                                {"axis2", cell.axis2},
                                {"error", *cell.error}});
            os << format_double(cell.axis1) << "," << format_double(cell.axis2)
               << ",,,,\n";
            continue;
        }
        os << format_double(cell.axis1) << "," << format_double(cell.axis2)
           << "," << format_double(cell.spectral_radius) << ","
           << (cell.lambda_avg ? format_double(*cell.lambda_avg) : "") << ","
           << cell.n_diverged << "," << sweep::to_string(cell.orbit_class)
           << "\n";
    }
    os.close();

    nlohmann::json manifest;
    for (const auto& [k, v] : log.entries) manifest["config"][k] = v;
    manifest["config"]["workers"] = cfg.workers;
    manifest["config_hash"] = log.hash();
    manifest["axes"] = {{"axis1", axis1_name}, {"axis2", axis2_name}};
    manifest["cell_count"] = grid.size();
    manifest["wall_ms"] = wall_ms;
    manifest["failures"] = failures;
    auto ms = open_output(dir / "manifest.json");
    ms << manifest.dump(2) << "\n";
}

// ------------------------------------------------------------- bifurcate

struct BifurcateArgs {
    ProtoFlags proto;
    dynamics::MapParams params;
    double g_min = 0.0, g_max = 1.5, g_step = 0.005;
    int n_total = 3000;
    int n_keep = 200;
    std::string out = "bifurcation.csv";
};

void cmd_bifurcate(const BifurcateArgs& a) {
    if (a.proto.prototype == "hamming")
        throw std::invalid_argument(
            "bifurcate sweeps the gain; the hamming prototype has gain 1");
    if (a.proto.gain_given)
        throw std::invalid_argument("bifurcate sweeps the gain; drop --gain");

    ConfigLog log;
    log.add("subcommand", "bifurcate");
    ProtoFlags unit = a.proto;
    unit.gain = 1.0;
    const fir::FirCoefficients unit_taps = resolve_taps(unit, log);
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log.add("g_min", a.g_min);
    log.add("g_max", a.g_max);
    log.add("g_step", a.g_step);
    log.add("n_total", a.n_total);
    log.add("n_keep", a.n_keep);

    const auto points = sweep::bifurcation_diagram(
        unit_taps, a.params, a.g_min, a.g_max, a.g_step, a.n_total, a.n_keep);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "G,x1\n";
    for (const auto& point : points) {
        if (point.diverged) {
            os << "# diverged G=" << format_double(point.gain) << "\n";
            continue;
        }
        for (double x : point.samples)
            os << format_double(point.gain) << "," << format_double(x) << "\n";
    }
}

// ------------------------------------------------------------------- psd

struct PsdArgs {
    ProtoFlags proto;
    dynamics::MapParams params;
    int n = 4595;
    int transient = 500;
    std::vector<double> x0;
    std::string out = "psd.csv";
};

void cmd_psd(const PsdArgs& a) {
    ConfigLog log;
    log.add("subcommand", "psd");
    const fir::FirCoefficients taps = resolve_taps(a.proto, log);
    log.add("alpha", a.params.alpha);
    log.add("beta", a.params.beta);
    log.add("n", a.n);
    log.add("transient", a.transient);
    const dynamics::FilteredHenonSystem sys(a.params, taps);
    const dynamics::State x0 = resolve_x0(
        a.x0, sys, dynamics::State(static_cast<std::size_t>(sys.dimension())));
    log.add("x0", join_values(x0));

    if (a.transient < 0 || a.n <= a.transient)
        throw std::invalid_argument("need n > transient >= 0");
    const dynamics::Orbit orbit = sys.iterate(x0, a.n);
    if (orbit.diverged)
        throw std::runtime_error("orbit diverged at step " +
                                 std::to_string(*orbit.escape_index) +
                                 "; no spectrum to estimate");
    std::vector<double> samples;
    samples.reserve(orbit.states.size() - static_cast<std::size_t>(a.transient));
    for (std::size_t k = static_cast<std::size_t>(a.transient);
         k < orbit.states.size(); ++k)
        samples.push_back(orbit.states[k][0]);

    const analysis::PsdEstimate est = analysis::psd_estimate(samples);

    auto os = open_output(a.out);
    log.write_header(os);
    os << "omega_over_pi,power_db\n";
    for (std::size_t k = 0; k < est.frequencies.size(); ++k)
        os << format_double(est.frequencies[k] / pi) << ","
           << format_double(est.power_db[k]) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FIR-filtered Henon map toolkit"};
    app.require_subcommand(1);

    FilterArgs filter_args;
    auto* filter_cmd =
        app.add_subcommand("filter", "emit taps, frequency response and zeros");
    add_prototype_options(filter_cmd, filter_args.proto);
    filter_cmd->add_option("--out", filter_args.out_dir, "output directory");

    OrbitArgs orbit_args;
    auto* orbit_cmd = app.add_subcommand("orbit", "dump an orbit as CSV");
    add_prototype_options(orbit_cmd, orbit_args.proto);
    orbit_cmd->add_option("--alpha", orbit_args.params.alpha, "map parameter");
    orbit_cmd->add_option("--beta", orbit_args.params.beta, "map parameter");
    orbit_cmd->add_option("--n", orbit_args.n, "iterations");
    orbit_cmd->add_option("--transient", orbit_args.transient,
                          "rows to drop from the front");
    orbit_cmd->add_option("--x0", orbit_args.x0, "initial state (default 0)")
        ->delimiter(',');
    orbit_cmd->add_option("--out", orbit_args.out, "output file");

    LyapunovArgs lyap_args;
    auto* lyap_cmd =
        app.add_subcommand("lyapunov", "largest Lyapunov exponent estimate");
    add_prototype_options(lyap_cmd, lyap_args.proto);
    lyap_cmd->add_option("--alpha", lyap_args.params.alpha, "map parameter");
    lyap_cmd->add_option("--beta", lyap_args.params.beta, "map parameter");
    lyap_cmd->add_option("--n", lyap_args.n, "total iterations");
    lyap_cmd->add_option("--transient", lyap_args.transient,
                         "discarded iterations");
    lyap_cmd
        ->add_option("--x0", lyap_args.x0,
                     "initial state (default: p+ offset by 1e-3 on x1)")
        ->delimiter(',');
    lyap_cmd->add_option("--out", lyap_args.out, "output file");

    FixedPointArgs fp_args;
    auto* fp_cmd =
        app.add_subcommand("fixed-points", "p1 branches over a gain range");
    fp_cmd->add_option("--alpha", fp_args.params.alpha, "map parameter");
    fp_cmd->add_option("--beta", fp_args.params.beta, "map parameter");
    fp_cmd->add_option("--g-min", fp_args.g_min, "gain range start");
    fp_cmd->add_option("--g-max", fp_args.g_max, "gain range end");
    fp_cmd->add_option("--step", fp_args.g_step, "gain step");
    fp_cmd->add_option("--out", fp_args.out, "output file");

    ClassifyArgs classify_args;
    auto* classify_cmd =
        app.add_subcommand("classify", "orbit class of one parameter cell");
    add_prototype_options(classify_cmd, classify_args.proto);
    classify_cmd->add_option("--alpha", classify_args.params.alpha,
                             "map parameter");
    classify_cmd->add_option("--beta", classify_args.params.beta,
                             "map parameter");
    add_protocol_options(classify_cmd, classify_args.protocol);
    classify_cmd->add_option("--seed", classify_args.seed, "RNG seed");
    classify_cmd->add_option("--out", classify_args.out, "output file");

    SweepArgs sweep_args;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "classify a 2-D parameter grid");
    sweep_cmd->add_option("--config", sweep_args.config_path,
                          "key=value config file; flags take precedence");
    auto* exp_opt =
        sweep_cmd
            ->add_option("--experiment", sweep_args.experiment,
                         "experiment I | II | III | IV | V (default I)")
            ->check(CLI::IsMember({"I", "II", "III", "IV", "V"}));
    auto& ax = sweep_args.axes;
    sweep_cmd->add_option("--g-min", ax.g_min, "gain axis start");
    sweep_cmd->add_option("--g-max", ax.g_max, "gain axis end");
    sweep_cmd->add_option("--g-step", ax.g_step, "gain axis step");
    sweep_cmd->add_option("--nz-min", ax.nz_min, "zero-count axis start");
    sweep_cmd->add_option("--nz-max", ax.nz_max, "zero-count axis end");
    sweep_cmd->add_option("--w0-min", ax.w0_min, "notch axis start (units of pi)");
    sweep_cmd->add_option("--w0-max", ax.w0_max, "notch axis end (units of pi)");
    sweep_cmd->add_option("--w0-step", ax.w0_step, "notch axis step");
    sweep_cmd->add_option("--wc-min", ax.wc_min, "cutoff axis start (units of pi)");
    sweep_cmd->add_option("--wc-max", ax.wc_max, "cutoff axis end (units of pi)");
    sweep_cmd->add_option("--wc-step", ax.wc_step, "cutoff axis step");
    auto* alpha_opt =
        sweep_cmd->add_option("--alpha", sweep_args.params.alpha, "map parameter");
    auto* beta_opt =
        sweep_cmd->add_option("--beta", sweep_args.params.beta, "map parameter");
    auto* nt_opt = sweep_cmd->add_option("--n-total", sweep_args.protocol.n_total,
                                         "iterations per orbit");
    auto* ntr_opt = sweep_cmd->add_option(
        "--n-transient", sweep_args.protocol.n_transient, "discarded iterations");
    auto* nic_opt = sweep_cmd->add_option("--n-ic", sweep_args.protocol.n_ic,
                                          "initial conditions per cell");
    auto* rad_opt = sweep_cmd->add_option(
        "--ic-radius", sweep_args.protocol.ic_radius, "sampling ball radius");
    auto* seed_opt = sweep_cmd->add_option("--seed", sweep_args.seed, "RNG seed");
    auto* workers_opt = sweep_cmd->add_option(
        "--workers", sweep_args.workers, "worker threads (0 = all cores)");
    sweep_cmd->add_option("--out", sweep_args.out_dir, "output directory");
    sweep_cmd->parse_complete_callback([&sweep_args, exp_opt, alpha_opt,
                                        beta_opt, nt_opt, ntr_opt, nic_opt,
                                        rad_opt, seed_opt, workers_opt] {
        sweep_args.experiment_given = exp_opt->count() > 0;
        sweep_args.alpha_given = alpha_opt->count() > 0;
        sweep_args.beta_given = beta_opt->count() > 0;
        sweep_args.n_total_given = nt_opt->count() > 0;
        sweep_args.n_transient_given = ntr_opt->count() > 0;
        sweep_args.n_ic_given = nic_opt->count() > 0;
        sweep_args.ic_radius_given = rad_opt->count() > 0;
        sweep_args.seed_given = seed_opt->count() > 0;
        sweep_args.workers_given = workers_opt->count() > 0;
    });

    BifurcateArgs bif_args;
    auto* bif_cmd = app.add_subcommand(
        "bifurcate", "attractor-following bifurcation diagram over gain");
    add_prototype_options(bif_cmd, bif_args.proto);
    bif_cmd->add_option("--alpha", bif_args.params.alpha, "map parameter");
    bif_cmd->add_option("--beta", bif_args.params.beta, "map parameter");
    bif_cmd->add_option("--g-min", bif_args.g_min, "gain range start");
    bif_cmd->add_option("--g-max", bif_args.g_max, "gain range end");
    bif_cmd->add_option("--g-step", bif_args.g_step, "gain step");
    bif_cmd->add_option("--n-total", bif_args.n_total, "iterations per gain");
    bif_cmd->add_option("--n-keep", bif_args.n_keep, "kept samples per gain");
    bif_cmd->add_option("--out", bif_args.out, "output file");

    PsdArgs psd_args;
    auto* psd_cmd =
        app.add_subcommand("psd", "Welch power spectral density of x1");
    add_prototype_options(psd_cmd, psd_args.proto);
    psd_cmd->add_option("--alpha", psd_args.params.alpha, "map parameter");
    psd_cmd->add_option("--beta", psd_args.params.beta, "map parameter");
    psd_cmd->add_option("--n", psd_args.n, "iterations");
    psd_cmd->add_option("--transient", psd_args.transient,
                        "samples to drop from the front");
    psd_cmd->add_option("--x0", psd_args.x0, "initial state (default 0)")
        ->delimiter(',');
    psd_cmd->add_option("--out", psd_args.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (filter_cmd->parsed()) cmd_filter(filter_args);
        if (orbit_cmd->parsed()) cmd_orbit(orbit_args);
        if (lyap_cmd->parsed()) cmd_lyapunov(lyap_args);
        if (fp_cmd->parsed()) cmd_fixed_points(fp_args);
        if (classify_cmd->parsed()) cmd_classify(classify_args);
        if (sweep_cmd->parsed()) cmd_sweep(sweep_args);
        if (bif_cmd->parsed()) cmd_bifurcate(bif_args);
        if (psd_cmd->parsed()) cmd_psd(psd_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

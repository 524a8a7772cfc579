// Orbit-class sweeps over 2-D parameter grids and attractor-following
// bifurcation diagrams.

#ifndef FHENON_SWEEP_HPP
#define FHENON_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhenon/dynamics.hpp"
#include "fhenon/fir_design.hpp"

namespace fhenon::sweep {

enum class OrbitClass { StableFixedPoint, Periodic, Chaotic, Divergent };

std::string_view to_string(OrbitClass c);  // fixed / periodic / chaotic / divergent

/// Iteration protocol shared by every cell of an experiment.
struct Protocol {
    int n_total = 3000;
    int n_transient = 500;
    int n_ic = 25;           // initial conditions per cell
    double ic_radius = 0.01; // sampling ball around the fixed point
};

/// n points uniformly distributed in the D-ball of the given radius
/// (isotropic gaussian direction scaled by radius * U^{1/D}).
/// Deterministic for a given seed.
std::vector<dynamics::State> sample_initial_conditions(
    const dynamics::State& center, double radius, int n, std::uint64_t seed);

struct CellResult {
    double axis1 = 0.0;
    double axis2 = 0.0;
    double spectral_radius = 0.0;
    std::optional<double> lambda_avg;   // present when orbits were simulated
    std::vector<double> lambda_per_ic;  // per-IC estimates (NaN where diverged)
    int n_diverged = 0;
    OrbitClass orbit_class = OrbitClass::StableFixedPoint;
    std::optional<std::string> error;   // numerical failure, cell kept in grid
};

/// Classifies one parameter cell:
///   1. spectral radius of the Jacobian at the extended p+ < 1 -> fixed;
///   2. otherwise simulate n_ic orbits sampled around p+; any escape -> divergent;
///   3. otherwise average the largest Lyapunov exponent: > 0 chaotic, <= 0 periodic.
CellResult classify_cell(const dynamics::FilteredHenonSystem& sys,
                         const Protocol& protocol, std::uint64_t cell_seed);

enum class Experiment { I = 1, II, III, IV, V };

Experiment experiment_from_string(std::string_view name);  // "I".."V"
std::string_view to_string(Experiment e);

/// Axis semantics per experiment (axis1 is the outer, row-major axis):
///   I   axis1 = G,        axis2 = N_z       equally spaced zeros
///   II  axis1 = w0/pi,    axis2 = G         notch pair
///   III axis1 = w0/pi,    axis2 = G         notch pair + zero at -1
///   IV  axis1 = N_z,      axis2 = G         repeated zeros at -1
///   V   axis1 = N_z,      axis2 = wc/pi     Hamming lowpass, G = 1
struct ExperimentConfig {
    Experiment experiment = Experiment::I;
    double axis1_min = 0.0, axis1_max = 0.0, axis1_step = 1.0;
    double axis2_min = 0.0, axis2_max = 0.0, axis2_step = 1.0;
    Protocol protocol;
    dynamics::MapParams params;
    std::uint64_t rng_seed = 42;
    int workers = 0;  // 0 = hardware concurrency
};

ExperimentConfig default_config(Experiment e);

/// Axis labels for CSV/manifest output, e.g. {"w0_over_pi", "G"}.
std::pair<std::string, std::string> axis_names(Experiment e);

/// Inclusive grid min, min+step, ..., max (last value within half a step of
/// max is kept).
std::vector<double> grid_values(double min, double max, double step);

/// System for one grid cell. Coefficients are the unit-gain prototype
/// scaled by the cell's gain, so the G = 0 column is the all-zero filter
/// (the gain -> 0 limit) rather than a construction error.
dynamics::FilteredHenonSystem cell_system(Experiment e, double axis1,
                                          double axis2,
                                          const dynamics::MapParams& params);

/// Per-cell RNG stream derived only from (rng_seed, i, j); scheduling and
/// worker count cannot change it.
std::uint64_t cell_seed(std::uint64_t rng_seed, int i, int j);

/// Evaluates every cell (in parallel when cfg.workers != 1) and returns
/// them in row-major order: axis1 outer, axis2 inner. Per-cell failures
/// are recorded in the cell, never aborting the grid.
std::vector<CellResult> run_experiment(const ExperimentConfig& cfg);

struct BifurcationPoint {
    double gain = 0.0;
    std::vector<double> samples;  // last n_keep x1 values
    bool diverged = false;
};

/// Attractor-following bifurcation diagram over an ascending gain grid.
/// The first point starts at p+ with +1e-3 on x1; each later point starts
/// from the previous point's final state. A divergent point is flagged and
/// the next one restarts from its own p+ plus the offset.
std::vector<BifurcationPoint> bifurcation_diagram(
    const fir::FirCoefficients& unit_gain_taps,
    const dynamics::MapParams& params, double g_min, double g_max,
    double g_step, int n_total = 3000, int n_keep = 200);

}  // namespace fhenon::sweep

#endif

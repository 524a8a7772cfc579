// Linear stability, largest Lyapunov exponent via the tangent map, and
// spectral diagnostics.

#ifndef FHENON_ANALYSIS_HPP
#define FHENON_ANALYSIS_HPP

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "fhenon/dynamics.hpp"

namespace fhenon::analysis {

struct StabilityReport {
    double spectral_radius = 0.0;  // max |eigenvalue|
    bool stable = false;           // spectral_radius < 1
};

/// Largest eigenvalue modulus of a dense real matrix (D <= 64).
/// Throws std::runtime_error if the eigenvalue iteration fails.
StabilityReport spectral_radius(const Eigen::MatrixXd& jacobian);

struct LyapunovEstimate {
    std::optional<double> lambda;      // nats per iteration; absent if diverged
    int n_used = 0;                    // steps accumulated after the transient
    bool diverged = false;
    std::optional<int> escape_index;
};

/// Tangent-map estimate of the largest Lyapunov exponent. The orbit and a
/// tangent vector are advanced jointly; log growth is accumulated at every
/// renormalization after the first n_transient steps, and the tangent
/// vector starts at (1, 0, ..., 0). With renorm_interval > 1 the vector is
/// renormalized every that many steps (the accumulated sum telescopes, so
/// the estimate is schedule independent up to roundoff).
LyapunovEstimate lyapunov_largest(const dynamics::FilteredHenonSystem& sys,
                                  const dynamics::State& x0,
                                  int n_total = 3000, int n_transient = 500,
                                  int renorm_interval = 1);

struct PsdEstimate {
    std::vector<double> frequencies;  // radians/sample, ascending in [0, pi]
    std::vector<double> power_db;     // normalized to 0 dB at the peak
};

/// Welch-style averaged periodogram: 256-sample segments, 50% overlap,
/// Hamming taper, per-segment mean removal. Needs at least 512 samples.
PsdEstimate psd_estimate(const std::vector<double>& samples);

}  // namespace fhenon::analysis

#endif

#include "fhenon/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace fhenon::analysis {

StabilityReport spectral_radius(const Eigen::MatrixXd& jacobian) {
    if (jacobian.rows() != jacobian.cols())
        throw std::invalid_argument("jacobian must be square");
    if (jacobian.rows() > 64)
        throw std::invalid_argument("dense eigenvalue solve limited to D <= 64");

    Eigen::EigenSolver<Eigen::MatrixXd> solver(jacobian, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue iteration did not converge");

    double radius = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        radius = std::max(radius, std::abs(solver.eigenvalues()[i]));
    return StabilityReport{radius, radius < 1.0};
}

LyapunovEstimate lyapunov_largest(const dynamics::FilteredHenonSystem& sys,
                                  const dynamics::State& x0, int n_total,
                                  int n_transient, int renorm_interval) {
    if (n_transient < 0 || n_total <= n_transient)
        throw std::invalid_argument("need n_total > n_transient >= 0");
    if (renorm_interval < 1)
        throw std::invalid_argument("renorm_interval must be >= 1");

    const std::size_t d = static_cast<std::size_t>(sys.dimension());
    dynamics::State x = x0;
    std::vector<double> v(d, 0.0);
    v[0] = 1.0;

    double log_sum = 0.0;
    int since_renorm = 0;

    auto renormalize = [&](int n) {
        double norm_sq = 0.0;
        for (double vi : v) norm_sq += vi * vi;
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0 || !std::isfinite(norm))
            throw std::runtime_error("tangent vector degenerated");
        if (n >= n_transient) log_sum += std::log(norm);
        for (double& vi : v) vi /= norm;
        since_renorm = 0;
    };

    for (int n = 0; n < n_total; ++n) {
        if (dynamics::escaped(x))
            return LyapunovEstimate{std::nullopt, 0, true, n};
        // Force a clean window boundary where accumulation begins so the
        // transient's growth never leaks into the sum.
        if (n == n_transient && since_renorm > 0) renormalize(n - 1);
        sys.tangent_step(x, v);
        x = sys.step(x);
        if (++since_renorm == renorm_interval) renormalize(n);
    }
    if (since_renorm > 0) renormalize(n_total - 1);
    if (dynamics::escaped(x))
        return LyapunovEstimate{std::nullopt, 0, true, n_total};

    const int n_used = n_total - n_transient;
    return LyapunovEstimate{log_sum / n_used, n_used, false, std::nullopt};
}

namespace {

constexpr int kSegmentLength = 256;
constexpr int kHopLength = 128;  // 50% overlap

}  // namespace

PsdEstimate psd_estimate(const std::vector<double>& samples) {
    using std::numbers::pi;
    const int n = static_cast<int>(samples.size());
    if (n < 2 * kSegmentLength)
        throw std::invalid_argument("psd needs at least 512 samples");

    std::vector<double> window(kSegmentLength);
    for (int j = 0; j < kSegmentLength; ++j)
        window[j] = 0.54 - 0.46 * std::cos(2.0 * pi * j / kSegmentLength);

    const int n_bins = kSegmentLength / 2 + 1;
    std::vector<double> power(n_bins, 0.0);
    std::vector<double> tapered(kSegmentLength);

    int n_segments = 0;
    for (int start = 0; start + kSegmentLength <= n; start += kHopLength) {
        double mean = 0.0;
        for (int j = 0; j < kSegmentLength; ++j) mean += samples[start + j];
        mean /= kSegmentLength;
        for (int j = 0; j < kSegmentLength; ++j)
            tapered[j] = (samples[start + j] - mean) * window[j];

        // Direct DFT over the 129 one-sided bins; segment length is fixed
        // and small so this stays cheap.
        for (int k = 0; k < n_bins; ++k) {
            const double w = 2.0 * pi * k / kSegmentLength;
            double re = 0.0, im = 0.0;
            for (int j = 0; j < kSegmentLength; ++j) {
                re += tapered[j] * std::cos(w * j);
                im -= tapered[j] * std::sin(w * j);
            }
            power[k] += re * re + im * im;
        }
        ++n_segments;
    }

    double peak = 0.0;
    for (double p : power) peak = std::max(peak, p);

    PsdEstimate out;
    out.frequencies.resize(n_bins);
    out.power_db.resize(n_bins);
    for (int k = 0; k < n_bins; ++k) {
        out.frequencies[k] = 2.0 * pi * k / kSegmentLength;
        const double rel = peak > 0.0 ? power[k] / peak : 0.0;
        out.power_db[k] = rel > 1e-30 ? 10.0 * std::log10(rel) : -300.0;
    }
    return out;
}

}  // namespace fhenon::analysis

#include "fhenon/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace fhenon::dynamics {

namespace {

// Gains below this are treated as zero when picking the fixed-point
// branch; the quadratic formula amplifies roundoff as 1/G^2.
constexpr double kZeroGainTol = 1e-12;

bool all_finite(const State& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

bool escaped(const State& x) {
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > kEscapeThreshold) return true;
    return false;
}

std::pair<double, std::optional<double>> fixed_point_coordinates(
    const MapParams& params, double gain) {
    const double one_minus_beta = 1.0 - params.beta;
    if (std::abs(gain) <= kZeroGainTol)
        return {params.alpha / one_minus_beta, std::nullopt};

    const double g2 = gain * gain;
    const double disc = one_minus_beta * one_minus_beta + 4.0 * params.alpha * g2;
    if (disc < 0.0)
        throw std::domain_error("fixed points are complex for these parameters");
    const double root = std::sqrt(disc);
    const double p_plus = 2.0 * params.alpha / (one_minus_beta + root);
    const double p_minus = (-one_minus_beta - root) / (2.0 * g2);
    return {p_plus, p_minus};
}

FilteredHenonSystem::FilteredHenonSystem(MapParams params,
                                         std::vector<double> coefficients)
    : params_(params), c_(std::move(coefficients)) {
    if (c_.size() < 2)
        throw std::invalid_argument("need at least two coefficients (N >= 1)");
    for (double v : c_)
        if (!std::isfinite(v))
            throw std::invalid_argument("non-finite filter coefficient");
    if (!std::isfinite(params_.alpha) || !std::isfinite(params_.beta))
        throw std::invalid_argument("non-finite map parameter");
}

FilteredHenonSystem::FilteredHenonSystem(MapParams params,
                                         const fir::FirCoefficients& coeffs)
    : FilteredHenonSystem(params, coeffs.taps) {}

double FilteredHenonSystem::gain() const {
    double sum = 0.0;
    for (double v : c_) sum += v;
    return sum;
}

State FilteredHenonSystem::step(const State& x) const {
    const std::size_t d = c_.size();
    if (x.size() != d)
        throw std::invalid_argument("state dimension mismatch");
    if (!all_finite(x))
        throw std::domain_error("diverged state: non-finite coordinate");

    State out(d);
    if (d == 2) {
        const double filtered = c_[0] * x[0] + c_[1] * x[1];
        out[0] = params_.alpha - filtered * filtered + params_.beta * x[1];
        out[1] = x[0];
        return out;
    }
    const double quad = params_.alpha - x[2] * x[2] + params_.beta * x[1];
    out[0] = quad;
    out[1] = x[0];
    double filt = c_[0] * quad + c_[1] * x[0] + c_[2] * x[1];
    for (std::size_t j = 3; j < d; ++j) filt += c_[j] * x[j];
    out[2] = filt;
    if (d >= 4) out[3] = x[1];
    for (std::size_t k = 4; k < d; ++k) out[k] = x[k - 1];
    return out;
}

Eigen::MatrixXd FilteredHenonSystem::jacobian_at(const State& x) const {
    const std::size_t d = c_.size();
    if (x.size() != d)
        throw std::invalid_argument("state dimension mismatch");

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
    if (d == 2) {
        jac(0, 0) = -2.0 * c_[0] * c_[0] * x[0] - 2.0 * c_[0] * c_[1] * x[1];
        jac(0, 1) =
            -2.0 * c_[0] * c_[1] * x[0] - 2.0 * c_[1] * c_[1] * x[1] + params_.beta;
        jac(1, 0) = 1.0;
        return jac;
    }
    jac(0, 1) = params_.beta;
    jac(0, 2) = -2.0 * x[2];
    jac(1, 0) = 1.0;
    jac(2, 0) = c_[1];
    jac(2, 1) = c_[0] * params_.beta + c_[2];
    jac(2, 2) = -2.0 * c_[0] * x[2];
    for (std::size_t j = 3; j < d; ++j)
        jac(2, static_cast<Eigen::Index>(j)) = c_[j];
    if (d >= 4) jac(3, 1) = 1.0;
    for (std::size_t k = 4; k < d; ++k)
        jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
    return jac;
}

void FilteredHenonSystem::tangent_step(const State& x,
                                       std::vector<double>& v) const {
    const std::size_t d = c_.size();
    if (x.size() != d || v.size() != d)
        throw std::invalid_argument("state dimension mismatch");

    if (d == 2) {
        const double filtered = c_[0] * x[0] + c_[1] * x[1];
        const double w0 = -2.0 * filtered * (c_[0] * v[0] + c_[1] * v[1]) +
                          params_.beta * v[1];
        v[1] = v[0];
        v[0] = w0;
        return;
    }
    const double w0 = params_.beta * v[1] - 2.0 * x[2] * v[2];
    double w2 = c_[1] * v[0] + (c_[0] * params_.beta + c_[2]) * v[1] -
                2.0 * c_[0] * x[2] * v[2];
    for (std::size_t j = 3; j < d; ++j) w2 += c_[j] * v[j];
    // shift rows: x4' = x2, x_{k+1}' = x_k
    for (std::size_t k = d - 1; k >= 4; --k) v[k] = v[k - 1];
    if (d >= 4) v[3] = v[1];
    v[1] = v[0];
    v[0] = w0;
    v[2] = w2;
}

State FilteredHenonSystem::extended_point(double p1, double g) const {
    const std::size_t d = c_.size();
    if (d == 2) return State{p1, p1};
    State x(d, p1);
    x[2] = g * p1;
    return x;
}

FixedPoints FilteredHenonSystem::fixed_points() const {
    const double g = gain();
    auto [p_plus, p_minus] = fixed_point_coordinates(params_, g);

    FixedPoints fp;
    fp.p1_plus = p_plus;
    if (!p_minus.has_value()) {
        // Zero gain: the filter output is pinned at 0 and the single fixed
        // point sits at alpha/(1-beta) in every delayed coordinate.
        fp.zero_gain = true;
        fp.plus = extended_point(p_plus, 0.0);
        return fp;
    }
    fp.p1_minus = p_minus;
    fp.plus = extended_point(p_plus, g);
    fp.minus = extended_point(*p_minus, g);
    return fp;
}

Orbit FilteredHenonSystem::iterate(const State& x0, int n) const {
    if (n < 1) throw std::invalid_argument("need n >= 1 iterations");
    Orbit orbit;
    orbit.states.reserve(static_cast<std::size_t>(n) + 1);
    orbit.states.push_back(x0);
    for (int k = 0; k < n; ++k) {
        const State& cur = orbit.states.back();
        if (escaped(cur)) {
            orbit.diverged = true;
            orbit.escape_index = k;
            return orbit;
        }
        orbit.states.push_back(step(cur));
    }
    if (escaped(orbit.states.back())) {
        orbit.diverged = true;
        orbit.escape_index = n;
    }
    return orbit;
}

}  // namespace fhenon::dynamics

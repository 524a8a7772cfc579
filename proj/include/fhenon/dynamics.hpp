// The Henon map with an FIR filter in its feedback loop, written as a
// first-order system of N+1 difference equations, together with its fixed
// points and Jacobians.

#ifndef FHENON_DYNAMICS_HPP
#define FHENON_DYNAMICS_HPP

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "fhenon/fir_design.hpp"

namespace fhenon::dynamics {

struct MapParams {
    double alpha = 1.4;
    double beta = 0.3;
};

/// Extended state (x1, x2, x3, x4, ..., x_{N+1}); for a one-zero filter the
/// state is just (x1, x2) and the filter output is implicit.
using State = std::vector<double>;

/// Orbits past this magnitude are treated as escaped to infinity.
constexpr double kEscapeThreshold = 1e6;

bool escaped(const State& x);

struct Orbit {
    std::vector<State> states;       // states[0] is the initial condition
    bool diverged = false;
    std::optional<int> escape_index; // first index past the threshold
};

/// Both fixed points in extended coordinates. When the gain is numerically
/// zero the quadratic degenerates and only the single point at
/// alpha/(1-beta) exists; `minus` is then absent and `p1_plus` holds that
/// value.
struct FixedPoints {
    State plus;
    std::optional<State> minus;
    double p1_plus = 0.0;
    std::optional<double> p1_minus;
    bool zero_gain = false;
};

/// First coordinates of the fixed points for a given gain. Solves
/// G^2 p^2 + (1-beta) p - alpha = 0; the positive root uses the
/// rationalized form 2 alpha / ((1-beta) + sqrt(...)) which stays accurate
/// as G -> 0.
std::pair<double, std::optional<double>> fixed_point_coordinates(
    const MapParams& params, double gain);

class FilteredHenonSystem {
public:
    FilteredHenonSystem(MapParams params, std::vector<double> coefficients);
    FilteredHenonSystem(MapParams params, const fir::FirCoefficients& coeffs);

    int dimension() const { return static_cast<int>(c_.size()); }  // N + 1
    const std::vector<double>& coefficients() const { return c_; }
    const MapParams& params() const { return params_; }
    double gain() const;

    /// One application of the map. Throws std::domain_error if the input
    /// state is non-finite; escape handling belongs to iterate().
    State step(const State& x) const;

    /// Jacobian of the map at a state.
    Eigen::MatrixXd jacobian_at(const State& x) const;

    /// v <- J(x) v without forming the matrix; O(D) using the sparse
    /// shift structure.
    void tangent_step(const State& x, std::vector<double>& v) const;

    FixedPoints fixed_points() const;

    /// Applies the map n times. orbit.states[k] is the state after k steps;
    /// iteration stops early when a coordinate exceeds the escape threshold
    /// or becomes non-finite (divergence is data, not an error).
    Orbit iterate(const State& x0, int n) const;

private:
    State extended_point(double p1, double gain) const;

    MapParams params_;
    std::vector<double> c_;
};

}  // namespace fhenon::dynamics

#endif

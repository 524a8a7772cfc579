#include "fhenon/fir_design.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fhenon::fir {

namespace {

constexpr double kPairTol = 1e-12;      // conjugate matching
constexpr double kImagResidueTol = 1e-12;

bool is_real(const Complex& z) { return std::abs(z.imag()) <= kPairTol; }

}  // namespace

void validate(const ZeroSet& zs) {
    if (zs.zeros.empty())
        throw std::invalid_argument("zero set must contain at least one zero");
    for (const Complex& z : zs.zeros) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("zero set contains a non-finite zero");
        if (std::abs(z - Complex{1.0, 0.0}) <= kPairTol)
            throw std::invalid_argument(
                "zero at z=1 makes the gain normalization undefined");
    }
    // Conjugate pairing: match every non-real zero against an unmatched
    // partner.
    std::vector<bool> matched(zs.zeros.size(), false);
    for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
        if (matched[i] || is_real(zs.zeros[i])) continue;
        bool found = false;
        for (std::size_t j = i + 1; j < zs.zeros.size(); ++j) {
            if (matched[j]) continue;
            if (std::abs(zs.zeros[j] - std::conj(zs.zeros[i])) <= 1e-9) {
                matched[i] = matched[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument(
                "unpaired complex zero: coefficients would not be real");
    }
}

namespace {

// Multiplication order for the monomial convolution. Zeros sorted by angle
// make the intermediate coefficients grow exponentially (clustered-root
// partial products), which leaks rounding error past 1e-12 by degree 40;
// a greedy max-distance (Leja) order over conjugate-pair groups keeps the
// partial products flat. The result is a permutation of the input with
// conjugate partners kept adjacent.
std::vector<Complex> leja_order(const std::vector<Complex>& zeros) {
    std::vector<std::vector<Complex>> groups;
    std::vector<bool> used(zeros.size(), false);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (is_real(zeros[i])) {
            groups.push_back({zeros[i]});
            continue;
        }
        for (std::size_t j = i + 1; j < zeros.size(); ++j) {
            if (!used[j] &&
                std::abs(zeros[j] - std::conj(zeros[i])) <= 1e-9) {
                groups.push_back({zeros[i], zeros[j]});
                used[j] = true;
                break;
            }
        }
    }

    std::vector<Complex> ordered;
    ordered.reserve(zeros.size());
    std::vector<bool> taken(groups.size(), false);
    for (std::size_t round = 0; round < groups.size(); ++round) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_g = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (taken[g]) continue;
            double score = 0.0;
            for (const Complex& m : groups[g]) {
                if (ordered.empty()) {
                    score += std::log(std::abs(m - 1.0) + 1e-300);
                } else {
                    for (const Complex& w : ordered)
                        score += std::log(std::abs(m - w) + 1e-300);
                }
            }
            if (score > best) {
                best = score;
                best_g = g;
            }
        }
        taken[best_g] = true;
        for (const Complex& m : groups[best_g]) ordered.push_back(m);
    }
    return ordered;
}

}  // namespace

FirCoefficients expand_zeros(const FilterSpec& spec) {
    validate(spec.zero_set);
    if (!std::isfinite(spec.gain))
        throw std::invalid_argument("filter gain must be finite");
    if (spec.gain == 0.0)
        throw std::invalid_argument("degenerate filter: gain = 0");

    // Monic numerator prod (z - z_k), leading coefficient first.
    std::vector<Complex> poly{Complex{1.0, 0.0}};
    Complex norm{1.0, 0.0};  // prod (1 - z_k)
    for (const Complex& z : leja_order(spec.zero_set.zeros)) {
        std::vector<Complex> next(poly.size() + 1, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= z * poly[i];
        }
        poly = std::move(next);
        norm *= (Complex{1.0, 0.0} - z);
    }

    const Complex scale = spec.gain / norm;
    FirCoefficients out;
    out.taps.reserve(poly.size());
    for (const Complex& b : poly) {
        const Complex c = scale * b;
        if (std::abs(c.imag()) > kImagResidueTol) {
            std::ostringstream msg;
            msg << "expansion left an imaginary residue of " << c.imag()
                << "; zeros are not conjugate-paired";
            throw std::invalid_argument(msg.str());
        }
        out.taps.push_back(c.real());
    }
    return out;
}

namespace {

using std::numbers::pi;

void check_gain(double g) {
    if (!std::isfinite(g) || g == 0.0)
        throw std::invalid_argument("prototype gain must be finite and nonzero");
}

std::vector<Complex> equally_spaced_zeros(int n, double /*gain*/) {
    if (n < 1) throw std::invalid_argument("equally-spaced: need n_zeros >= 1");
    std::vector<Complex> zs;
    zs.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n / 2; ++k) {
        const double theta = (2.0 * k - 1.0) * pi / n;
        zs.emplace_back(std::cos(theta), std::sin(theta));
        zs.emplace_back(std::cos(theta), -std::sin(theta));
    }
    if (n % 2 != 0) zs.emplace_back(-1.0, 0.0);
    return zs;
}

std::vector<Complex> notch_zeros(double w0) {
    if (!(w0 > 0.0 && w0 <= pi))
        throw std::invalid_argument("notch: need 0 < omega0 <= pi");
    return {Complex{std::cos(w0), std::sin(w0)},
            Complex{std::cos(w0), -std::sin(w0)}};
}

FirCoefficients hamming_lowpass(int n, double wc) {
    if (n < 1) throw std::invalid_argument("hamming: need n_zeros >= 1");
    if (!(wc > 0.0 && wc < pi))
        throw std::invalid_argument("hamming: need 0 < omega_c < pi");

    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };

    FirCoefficients out;
    out.taps.resize(static_cast<std::size_t>(n) + 1);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double window = 0.54 - 0.46 * std::cos(2.0 * pi * j / n);
        out.taps[static_cast<std::size_t>(j)] =
            sinc(wc * (j - n / 2.0)) * window;
        sum += out.taps[static_cast<std::size_t>(j)];
    }
    if (std::abs(sum) < 1e-12)
        throw std::invalid_argument("hamming: degenerate design, taps sum to 0");
    for (double& t : out.taps) t /= sum;
    return out;
}

}  // namespace

std::vector<Complex> prototype_zeros(const FilterPrototype& p) {
    return std::visit(
        [](const auto& v) -> std::vector<Complex> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EquallySpaced>) {
                return equally_spaced_zeros(v.n_zeros, v.gain);
            } else if constexpr (std::is_same_v<T, Notch>) {
                return notch_zeros(v.omega0);
            } else if constexpr (std::is_same_v<T, NotchPlusNyquist>) {
                auto zs = notch_zeros(v.omega0);
                zs.emplace_back(-1.0, 0.0);
                return zs;
            } else if constexpr (std::is_same_v<T, RepeatedNyquist>) {
                if (v.n_zeros < 1)
                    throw std::invalid_argument(
                        "repeated-nyquist: need n_zeros >= 1");
                return std::vector<Complex>(
                    static_cast<std::size_t>(v.n_zeros), Complex{-1.0, 0.0});
            } else {
                return coefficient_zeros(hamming_lowpass(v.n_zeros, v.omega_c));
            }
        },
        p);
}

FirCoefficients make_prototype(const FilterPrototype& p) {
    return std::visit(
        [&](const auto& v) -> FirCoefficients {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HammingLowpass>) {
                return hamming_lowpass(v.n_zeros, v.omega_c);
            } else {
                check_gain(v.gain);
                return expand_zeros(FilterSpec{ZeroSet{prototype_zeros(p)}, v.gain});
            }
        },
        p);
}

double gain_of(const FirCoefficients& c) {
    double sum = 0.0;
    for (double t : c.taps) sum += t;
    return sum;
}

Complex frequency_response(const FirCoefficients& c, double omega) {
    Complex h{0.0, 0.0};
    for (std::size_t j = 0; j < c.taps.size(); ++j)
        h += c.taps[j] * std::exp(Complex{0.0, -omega * static_cast<double>(j)});
    return h;
}

double magnitude_db(Complex h) {
    const double mag = std::abs(h);
    if (mag < 1e-15) return -300.0;
    return 20.0 * std::log10(mag);
}

std::vector<Complex> coefficient_zeros(const FirCoefficients& c) {
    if (c.taps.empty())
        throw std::invalid_argument("no coefficients");
    // Roots of c_0 z^N + c_1 z^{N-1} + ... + c_N. Taps that are zero
    // relative to the largest one are trimmed first: a tiny leading tap
    // would otherwise wreck the companion matrix, and each trailing zero
    // tap contributes an exact root at the origin.
    double peak = 0.0;
    for (double t : c.taps) peak = std::max(peak, std::abs(t));
    if (peak == 0.0)
        throw std::invalid_argument("all coefficients are zero");
    const double tol = 1e-14 * peak;
    std::size_t first = 0, last = c.taps.size() - 1;
    while (first < last && std::abs(c.taps[first]) <= tol) ++first;
    while (last > first && std::abs(c.taps[last]) <= tol) --last;

    std::vector<Complex> roots(c.taps.size() - 1 - last, Complex{0.0, 0.0});
    const std::size_t n = last - first;
    if (n == 0) return roots;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        companion(0, static_cast<Eigen::Index>(i)) =
            -c.taps[first + i + 1] / c.taps[first];
    for (std::size_t i = 1; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("companion eigenvalue computation failed");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        roots.push_back(solver.eigenvalues()[i]);
    return roots;
}

}  // namespace fhenon::fir

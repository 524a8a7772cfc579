// FIR filter construction: zero sets, prototype designs, coefficient
// expansion and frequency response evaluation.

#ifndef FHENON_FIR_DESIGN_HPP
#define FHENON_FIR_DESIGN_HPP

#include <complex>
#include <variant>
#include <vector>

namespace fhenon::fir {

using Complex = std::complex<double>;

/// Zeros of the transfer function numerator, i.e. the roots of z^N H(z).
/// Non-real zeros must appear in conjugate pairs so the expanded
/// coefficients are real, and no zero may sit at z = 1 (the gain
/// normalization divides by prod(1 - z_k)).
struct ZeroSet {
    std::vector<Complex> zeros;

    int count() const { return static_cast<int>(zeros.size()); }
};

/// Throws std::invalid_argument if a conjugate partner is missing or a
/// zero coincides with z = 1.
void validate(const ZeroSet& zs);

/// Designer's view of the filter: zero locations plus the gain G = H(1).
struct FilterSpec {
    ZeroSet zero_set;
    double gain = 1.0;
};

/// Runtime view: real taps c_0 ... c_N applied to the current and N past
/// inputs.
struct FirCoefficients {
    std::vector<double> taps;

    int order() const { return static_cast<int>(taps.size()) - 1; }
};

/// Expands H(z) = G * prod (z - z_k) / (z (1 - z_k)) into taps.
///
/// The numerator polynomial is built by convolving the monomials
/// (z - z_k) in complex arithmetic; the result is scaled by
/// G / prod(1 - z_k) and the imaginary residue of every coefficient is
/// checked against 1e-12 before it is dropped.
FirCoefficients expand_zeros(const FilterSpec& spec);

// Prototype families. Frequencies are in radians per sample.
struct EquallySpaced {          // N zeros spaced 2*pi/N around the unit circle
    int n_zeros = 1;
    double gain = 1.0;
};
struct Notch {                  // conjugate pair at e^{+-j w0}, 0 < w0 <= pi
    double omega0 = 0.0;
    double gain = 1.0;
};
struct NotchPlusNyquist {       // notch pair plus a zero at z = -1
    double omega0 = 0.0;
    double gain = 1.0;
};
struct RepeatedNyquist {        // N zeros at z = -1
    int n_zeros = 1;
    double gain = 1.0;
};
struct HammingLowpass {         // windowed-sinc lowpass, gain fixed at 1
    int n_zeros = 1;
    double omega_c = 0.0;       // cutoff, 0 < wc < pi
};

using FilterPrototype = std::variant<EquallySpaced, Notch, NotchPlusNyquist,
                                     RepeatedNyquist, HammingLowpass>;

/// Zero locations of a prototype. The zero-placement families return their
/// construction zeros (conjugate pairs adjacent); HammingLowpass zeros are
/// recovered numerically from the taps.
std::vector<Complex> prototype_zeros(const FilterPrototype& p);

FirCoefficients make_prototype(const FilterPrototype& p);

/// G = H(1), the exact coefficient sum.
double gain_of(const FirCoefficients& c);

/// H(e^{jw}) = sum c_j e^{-j w j}.
Complex frequency_response(const FirCoefficients& c, double omega);

/// 20 log10 |h|, floored at -300 dB for |h| < 1e-15.
double magnitude_db(Complex h);

/// Roots of z^N H(z) via companion-matrix eigenvalues.
std::vector<Complex> coefficient_zeros(const FirCoefficients& c);

}  // namespace fhenon::fir

#endif

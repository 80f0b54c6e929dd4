#pragma once

#include <array>
#include <complex>

namespace epinet {

using Mat4 = std::array<std::array<double, 4>, 4>;
using Spectrum = std::array<std::complex<double>, 4>;

double det4(const Mat4& m);

// Coefficients (b0, b1, b2, b3) of the characteristic polynomial written as
// lambda^4 - b3 lambda^3 + b2 lambda^2 - b1 lambda + b0, i.e. b3 = trace,
// b2 / b1 = sums of 2x2 / 3x3 principal minors, b0 = det.
std::array<double, 4> char_coeffs(const Mat4& m);

// Roots of lambda^4 - b3 lambda^3 + b2 lambda^2 - b1 lambda + b0,
// Durand-Kerner iteration followed by Newton polishing.
Spectrum quartic_roots(double b0, double b1, double b2, double b3);

Spectrum eigenvalues(const Mat4& m);

double spectral_radius(const Spectrum& eigs);

} // namespace epinet

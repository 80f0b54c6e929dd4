#include "epinet/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace epinet {

namespace {

double det2(double a, double b, double c, double d) { return a * d - b * c; }

double det3(const Mat4& m, int r0, int r1, int r2, int c0, int c1, int c2) {
    return m[r0][c0] * det2(m[r1][c1], m[r1][c2], m[r2][c1], m[r2][c2]) -
           m[r0][c1] * det2(m[r1][c0], m[r1][c2], m[r2][c0], m[r2][c2]) +
           m[r0][c2] * det2(m[r1][c0], m[r1][c1], m[r2][c0], m[r2][c1]);
}

} // namespace

double det4(const Mat4& m) {
    double det = 0.0;
    double sign = 1.0;
    for (int c = 0; c < 4; ++c) {
        int cols[3];
        int k = 0;
        for (int j = 0; j < 4; ++j)
            if (j != c) cols[k++] = j;
        det += sign * m[0][c] * det3(m, 1, 2, 3, cols[0], cols[1], cols[2]);
        sign = -sign;
    }
    return det;
}

std::array<double, 4> char_coeffs(const Mat4& m) {
    const double b3 = m[0][0] + m[1][1] + m[2][2] + m[3][3];
    double b2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            b2 += det2(m[i][i], m[i][j], m[j][i], m[j][j]);
    double b1 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k)
                b1 += det3(m, i, j, k, i, j, k);
    return {det4(m), b1, b2, b3};
}

namespace {

using cd = std::complex<double>;

cd poly_eval(const std::array<double, 4>& b, cd z) {
    // lambda^4 - b3 lambda^3 + b2 lambda^2 - b1 lambda + b0
    return (((z - b[3]) * z + b[2]) * z - b[1]) * z + b[0];
}

cd poly_deriv(const std::array<double, 4>& b, cd z) {
    return ((4.0 * z - 3.0 * b[3]) * z + 2.0 * b[2]) * z - b[1];
}

} // namespace

Spectrum quartic_roots(double b0, double b1, double b2, double b3) {
    const std::array<double, 4> b{b0, b1, b2, b3};
    // Root magnitude scale for the initial circle.
    double scale = 1.0;
    scale = std::max(scale, std::abs(b3));
    scale = std::max(scale, std::sqrt(std::abs(b2)));
    scale = std::max(scale, std::cbrt(std::abs(b1)));
    scale = std::max(scale, std::pow(std::abs(b0), 0.25));

    Spectrum z;
    const cd seed(0.4, 0.9); // standard Durand-Kerner start, no root symmetry
    cd p = scale * seed;
    for (int i = 0; i < 4; ++i) {
        z[i] = p;
        p *= seed;
    }

    const double tol = 1e-15 * std::max(scale, 1.0);
    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0.0;
        for (int i = 0; i < 4; ++i) {
            cd denom(1.0, 0.0);
            for (int j = 0; j < 4; ++j)
                if (j != i) denom *= z[i] - z[j];
            if (std::abs(denom) == 0.0) continue;
            const cd delta = poly_eval(b, z[i]) / denom;
            z[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < tol) break;
    }

    // Newton polishing.
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < 3; ++k) {
            const cd d = poly_deriv(b, z[i]);
            if (std::abs(d) < 1e-300) break;
            z[i] -= poly_eval(b, z[i]) / d;
        }
        // Snap nearly-real roots so classification is stable.
        if (std::abs(z[i].imag()) < 1e-10 * std::max(1.0, std::abs(z[i].real())))
            z[i] = cd(z[i].real(), 0.0);
    }
    std::sort(z.begin(), z.end(), [](const cd& a, const cd& c) {
        return a.real() != c.real() ? a.real() < c.real() : a.imag() < c.imag();
    });
    return z;
}

Spectrum eigenvalues(const Mat4& m) {
    const auto b = char_coeffs(m);
    return quartic_roots(b[0], b[1], b[2], b[3]);
}

double spectral_radius(const Spectrum& eigs) {
    double r = 0.0;
    for (const auto& e : eigs) r = std::max(r, std::abs(e));
    return r;
}

} // namespace epinet

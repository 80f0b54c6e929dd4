#include <doctest.h>

#include "epinet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#if EPINET_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

using namespace epinet;

namespace {

Mat4 diag(double a, double b, double c, double d) {
    Mat4 m{};
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    m[3][3] = d;
    return m;
}

// Companion matrix of lambda^4 + 3 lambda^3 + 3 lambda^2 + 3 lambda + 2,
// whose roots are +-i, -1, -2.
Mat4 companion_i12() {
    Mat4 m{};
    m[0][3] = -2.0;
    m[1][3] = -3.0;
    m[2][3] = -3.0;
    m[3][3] = -3.0;
    m[1][0] = m[2][1] = m[3][2] = 1.0;
    return m;
}

std::complex<double> char_poly(const std::array<double, 4>& b, std::complex<double> z) {
    return ((z - b[3]) * z + b[2]) * z * z - b[1] * z + b[0];
}

} // namespace

TEST_CASE("determinant") {
    CHECK(det4(diag(-1, -2, -3, -4)) == doctest::Approx(24.0));
    CHECK(det4(Mat4{}) == 0.0);
    Mat4 m{{{2, 0, 0, 0}, {0, 1, 5, 0}, {0, 0, 1, 0}, {7, 0, 0, 3}}};
    CHECK(det4(m) == doctest::Approx(6.0));
}

TEST_CASE("characteristic coefficients") {
    SUBCASE("diagonal with spectrum {-1,-2,-3,-4}") {
        const auto b = char_coeffs(diag(-1, -2, -3, -4));
        CHECK(b[0] == doctest::Approx(24.0));
        CHECK(b[1] == doctest::Approx(-50.0));
        CHECK(b[2] == doctest::Approx(35.0));
        CHECK(b[3] == doctest::Approx(-10.0));
    }
    SUBCASE("companion matrix with spectrum {+-i, -1, -2}") {
        const auto b = char_coeffs(companion_i12());
        CHECK(b[0] == doctest::Approx(2.0));
        CHECK(b[1] == doctest::Approx(-3.0));
        CHECK(b[2] == doctest::Approx(3.0));
        CHECK(b[3] == doctest::Approx(-3.0));
    }
    SUBCASE("zero matrix") {
        const auto b = char_coeffs(Mat4{});
        for (double c : b) CHECK(c == 0.0);
    }
}

TEST_CASE("quartic roots") {
    SUBCASE("real spectrum") {
        Spectrum r = quartic_roots(24.0, -50.0, 35.0, -10.0);
        std::array<double, 4> re;
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(r[i].imag()) <= 1e-9);
            re[i] = r[i].real();
        }
        std::sort(re.begin(), re.end());
        CHECK(re[0] == doctest::Approx(-4.0).epsilon(1e-9));
        CHECK(re[1] == doctest::Approx(-3.0).epsilon(1e-9));
        CHECK(re[2] == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(re[3] == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("complex pair") {
        Spectrum r = quartic_roots(2.0, -3.0, 3.0, -3.0);
        int imag_count = 0;
        for (const auto& z : r) {
            if (std::abs(z.imag()) > 0.5) {
                ++imag_count;
                CHECK(std::abs(z.real()) <= 1e-9);
                CHECK(std::abs(std::abs(z.imag()) - 1.0) <= 1e-9);
            }
        }
        CHECK(imag_count == 2);
    }
}

TEST_CASE("spectral radius") {
    Spectrum s{{{3.0, 4.0}, {0.0, 0.0}, {-1.0, 0.0}, {0.0, 2.0}}};
    CHECK(spectral_radius(s) == doctest::Approx(5.0));
}

TEST_CASE("characteristic polynomial vanishes on computed eigenvalues of random matrices") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        Mat4 m;
        for (auto& row : m)
            for (double& v : row) v = entry(rng);
        const auto b = char_coeffs(m);
        const double scale =
            std::max({1.0, std::abs(b[0]), std::abs(b[1]), std::abs(b[2]), std::abs(b[3])});
        for (const auto& z : eigenvalues(m))
            CHECK(std::abs(char_poly(b, z)) <= 1e-6 * scale);
    }
}

#if EPINET_HAVE_EIGEN
TEST_CASE("eigenvalues agree with an independent QR solver") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        Mat4 m;
        Eigen::Matrix4d em;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) em(i, j) = m[i][j] = entry(rng);

        auto ours = eigenvalues(m);
        Eigen::EigenSolver<Eigen::Matrix4d> solver(em);
        std::array<std::complex<double>, 4> ref;
        for (int i = 0; i < 4; ++i) ref[i] = solver.eigenvalues()(i);

        // Greedy matching; eigenvalues of random matrices are well separated
        // with overwhelming probability.
        double rho = spectral_radius(ours);
        for (const auto& z : ours) {
            double best = 1e300;
            for (const auto& w : ref) best = std::min(best, std::abs(z - w));
            CHECK(best <= 1e-6 * std::max(1.0, rho));
        }
    }
}
#endif

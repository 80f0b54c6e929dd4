#include <doctest.h>

#include "epinet/equilibria.hpp"
#include "epinet/errors.hpp"
#include "epinet/integrator.hpp"

#include <cmath>

using namespace epinet;

TEST_CASE("disease-free state") {
    SystemParams p;
    const ModelState df = disease_free_state(p);
    CHECK(df.I == 0.0);
    CHECK(df.SI == 0.0);
    CHECK(df.II == 0.0);
    CHECK(df.SS == doctest::Approx(999000.0));
    CHECK(mean_degree(df, p) == doctest::Approx(999.0));

    const Derivative d = rhs_constant(df, p, {3.0, 0.7});
    CHECK(d.dI == 0.0);
    CHECK(d.dSI == 0.0);
    CHECK(d.dII == 0.0);
    CHECK(d.dSS == doctest::Approx(0.0));
}

TEST_CASE("disease-free Jacobian") {
    SystemParams p; // tau=0.1, gamma=1, N=1000

    SUBCASE("inner block entries and instability below threshold") {
        const Mat4 J = disease_free_jacobian(p, {0.0, 0.001});
        CHECK(J[1][1] == doctest::Approx(98.7));
        CHECK(J[1][2] == doctest::Approx(1.0));
        CHECK(J[2][1] == doctest::Approx(0.2));
        CHECK(J[2][2] == doctest::Approx(-2.0));
        const double det_inner = J[1][1] * J[2][2] - J[1][2] * J[2][1];
        CHECK(det_inner == doctest::Approx(-197.6));
        CHECK(det_inner < 0.0); // saddle: disease-free state unstable
    }

    SUBCASE("stable above threshold") {
        const Mat4 J = disease_free_jacobian(p, {99.0, 0.001});
        const double det_inner = J[1][1] * J[2][2] - J[1][2] * J[2][1];
        const double tr_inner = J[1][1] + J[2][2];
        CHECK(det_inner == doctest::Approx(0.4));
        CHECK(tr_inner == doctest::Approx(-2.3));
    }

    SUBCASE("-gamma and -u2 are always eigenvalues") {
        for (double u1 : {0.0, 30.0, 99.0}) {
            for (double u2 : {0.001, 0.3}) {
                const auto eigs = eigenvalues(disease_free_jacobian(p, {u1, u2}));
                double d_gamma = 1e300, d_u2 = 1e300;
                for (const auto& z : eigs) {
                    d_gamma = std::min(d_gamma, std::abs(z - std::complex<double>(-p.gamma)));
                    d_u2 = std::min(d_u2, std::abs(z - std::complex<double>(-u2)));
                }
                CHECK(d_gamma <= 1e-9);
                CHECK(d_u2 <= 1e-9);
            }
        }
    }

    SUBCASE("matches the finite-difference Jacobian entrywise") {
        const Mat4 A = disease_free_jacobian(p, {5.0, 0.01});
        const Mat4 B = numeric_jacobian(disease_free_state(p), p, {5.0, 0.01});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(std::abs(A[i][j] - B[i][j]) <=
                      1e-4 * std::max(1.0, std::abs(A[i][j])));
    }
}

TEST_CASE("transcritical threshold") {
    SystemParams p;
    CHECK(transcritical_u1(p) == doctest::Approx(98.8).epsilon(1e-14));

    SystemParams zero = p;
    zero.tau = 0.0;
    CHECK(transcritical_u1(zero) == 0.0);

    // The leading eigenvalue of the disease-free Jacobian changes sign
    // exactly at the threshold.
    const auto leading = [&](double u1) {
        double max_re = -1e300;
        for (const auto& z : eigenvalues(disease_free_jacobian(p, {u1, 0.01})))
            max_re = std::max(max_re, z.real());
        return max_re;
    };
    double lo = 50.0, hi = 150.0;
    REQUIRE(leading(lo) > 0.0);
    REQUIRE(leading(hi) < 0.0);
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (leading(mid) > 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(98.8).epsilon(1e-6));
}

TEST_CASE("numeric Jacobian recovers a nearly linear field") {
    // rhs_constant is close to linear in II at fixed other coordinates; the
    // full check is the entrywise match against the analytic disease-free
    // Jacobian above. Here: symmetry of central differences, O(h^2) decay.
    SystemParams p;
    const ModelState x{50.0, 400.0, 80.0, 8000.0};
    const Mat4 J = numeric_jacobian(x, p, {1.0, 0.01});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::isfinite(J[i][j]));
    // dI/dSI = tau, dI/dI = -gamma exactly.
    CHECK(J[0][0] == doctest::Approx(-p.gamma).epsilon(1e-7));
    CHECK(J[0][1] == doctest::Approx(p.tau).epsilon(1e-7));
    CHECK(J[0][2] == doctest::Approx(0.0));
    CHECK(J[0][3] == doctest::Approx(0.0));
}

TEST_CASE("endemic state") {
    SystemParams p;

    SUBCASE("exists below threshold and satisfies the reduction") {
        const ControlInput u{0.0, 0.001};
        const auto x = endemic_state(p, u);
        REQUIRE(x.has_value());
        CHECK(x->I > 0.0);
        CHECK(x->SI == doctest::Approx(p.gamma / p.tau * x->I).epsilon(1e-10));
        const Derivative d = rhs_constant(*x, p, u);
        const double scale = std::max({1.0, x->I, x->SI, x->II, x->SS});
        CHECK(std::abs(d.dI) <= 1e-6 * scale);
        CHECK(std::abs(d.dSI) <= 1e-6 * scale);
        CHECK(std::abs(d.dII) <= 1e-6 * scale);
        CHECK(std::abs(d.dSS) <= 1e-6 * scale);
    }

    SUBCASE("long-run integration converges to it when stable") {
        const ControlInput u{10.0, 0.5};
        const auto x = endemic_state(p, u);
        REQUIRE(x.has_value());
        const auto rep = stability_report(*x, p, u);
        REQUIRE(rep.classification == Stability::Stable);

        const ControlSchedule hold{0.5, std::vector<ControlInput>(400, u)};
        const Trajectory traj = simulate(p, hold, SystemKind::Constant);
        CHECK(traj.outputs.back().first == doctest::Approx(x->I).epsilon(5e-3));
    }

    SUBCASE("absent far above the threshold") {
        CHECK_FALSE(endemic_state(p, {150.0, 0.001}).has_value());
    }

    SUBCASE("requires positive tau and u2") {
        SystemParams cold = p;
        cold.tau = 0.0;
        CHECK_FALSE(endemic_state(cold, {0.0, 0.001}).has_value());
        CHECK_FALSE(endemic_state(p, {0.0, 0.0}).has_value());
    }
}

TEST_CASE("stability report internal consistency") {
    SystemParams p;
    const ControlInput u{10.0, 0.5};
    const auto x = endemic_state(p, u);
    REQUIRE(x.has_value());
    const auto rep = stability_report(*x, p, u);

    // The quartic evaluated at each reported eigenvalue is ~0.
    const auto& b = rep.coeffs;
    const double scale =
        std::max({1.0, std::abs(b[0]), std::abs(b[1]), std::abs(b[2]), std::abs(b[3])});
    for (const auto& z : rep.eigs) {
        const auto v = ((z - b[3]) * z + b[2]) * z * z - b[1] * z + b[0];
        CHECK(std::abs(v) <= 1e-6 * scale);
    }
}

TEST_CASE("Hopf residual arithmetic") {
    // g = b0 b3^2 - b1 (b2 b3 - b1) on synthetic coefficient sets.
    const auto g = [](std::array<double, 4> b) {
        return b[0] * b[3] * b[3] - b[1] * (b[2] * b[3] - b[1]);
    };
    CHECK(g({2.0, -3.0, 3.0, -3.0}) == doctest::Approx(0.0));      // {+-i, -1, -2}
    CHECK(g({24.0, -50.0, 35.0, -10.0}) == doctest::Approx(-12600.0));
}

TEST_CASE("Hopf residual requires an endemic state") {
    SystemParams p;
    CHECK_FALSE(hopf_residual(p, {150.0, 0.001}).has_value());
    CHECK(hopf_residual(p, {0.0, 0.001}).has_value());
}

TEST_CASE("Hopf curve") {
    SystemParams p;

    SUBCASE("empty grid gives an empty curve") {
        CHECK(hopf_curve(p, {}, {1e-3, 5.0}).empty());
        CHECK(hopf_curve(p, {50.0}, {5.0, 1e-3}).empty());
    }

    SUBCASE("curve point has a near-imaginary eigenvalue pair and flips stability") {
        const auto curve = hopf_curve(p, {50.0}, {1e-3, 5.0});
        REQUIRE(curve.size() == 1);
        const auto [u1, u2s] = curve.front();

        const auto x = endemic_state(p, {u1, u2s});
        REQUIRE(x.has_value());
        const auto rep = stability_report(*x, p, {u1, u2s});
        const double rho = spectral_radius(rep.eigs);
        double min_re = 1e300;
        for (const auto& z : rep.eigs)
            if (std::abs(z.imag()) > 1e-6 * rho) min_re = std::min(min_re, std::abs(z.real()));
        CHECK(min_re <= 1e-5 * rho);

        const auto above = endemic_state(p, {u1, u2s * 1.05});
        const auto below = endemic_state(p, {u1, u2s * 0.95});
        REQUIRE(above.has_value());
        REQUIRE(below.has_value());
        CHECK(stability_report(*above, p, {u1, u2s * 1.05}).classification ==
              Stability::Stable);
        CHECK(stability_report(*below, p, {u1, u2s * 0.95}).classification ==
              Stability::Unstable);
    }
}

TEST_CASE("region classification") {
    SystemParams p;
    CHECK(classify_region(p, {100.0, 0.01}) == RegionClass::DiseaseFreeStable);
    CHECK(classify_region(p, {10.0, 0.5}) == RegionClass::EndemicStable);
    CHECK(classify_region(p, {10.0, 0.1}) == RegionClass::Oscillatory);
    CHECK(classify_region(p, {50.0, 0.01}) == RegionClass::Oscillatory);
    CHECK_THROWS_AS(classify_region(p, {1.0, 0.0}), ConfigError);

    CHECK(std::string(to_string(RegionClass::EndemicStable)) == "endemic_stable");
    CHECK(std::string(to_string(RegionClass::Oscillatory)) == "oscillatory");
    CHECK(std::string(to_string(RegionClass::DiseaseFreeStable)) == "disease_free_stable");
}

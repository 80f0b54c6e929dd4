#include <doctest.h>

#include "epinet/errors.hpp"
#include "epinet/model.hpp"

#include <cmath>
#include <random>

using namespace epinet;

TEST_CASE("parameter validation") {
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    p.N = 2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.tau = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.I0 = 1001.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.n0 = 1000.0; // > N-1
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("mean-field pair initialization") {
    SystemParams p;
    ModelState x = initial_state(p);
    CHECK(x.I == doctest::Approx(10.0));
    CHECK(x.SI == doctest::Approx(99.0));
    CHECK(x.II == doctest::Approx(1.0));
    CHECK(x.SS == doctest::Approx(9801.0));
    CHECK(mean_degree(x, p) == doctest::Approx(10.0).epsilon(1e-14));

    p.I0 = 0.0;
    x = initial_state(p);
    CHECK(x.SI == 0.0);
    CHECK(x.II == 0.0);
    CHECK(x.SS == doctest::Approx(10000.0));

    p.I0 = 1000.0;
    x = initial_state(p);
    CHECK(x.SI == 0.0);
    CHECK(x.II == doctest::Approx(10000.0));
    CHECK(x.SS == 0.0);
}

TEST_CASE("mean degree equals n0 exactly for random valid parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> un(0.5, 50.0), ui(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p;
        p.N = 100 + static_cast<int>(ui(rng) * 2000);
        p.n0 = un(rng);
        p.I0 = ui(rng) * p.N;
        p.validate();
        CHECK(mean_degree(initial_state(p), p) == doctest::Approx(p.n0).epsilon(1e-12));
    }
}

TEST_CASE("mean degree formula") {
    SystemParams p;
    CHECK(mean_degree({10.0, 99.0, 1.0, 9801.0}, p) == doctest::Approx(10.0));
    CHECK(mean_degree({0.0, 0.0, 0.0, 0.0}, p) == 0.0);
    CHECK(mean_degree({0.0, 0.0, 0.0, 999000.0}, p) == doctest::Approx(999.0));
}

TEST_CASE("closure triples") {
    SystemParams p;
    const ModelState x{10.0, 99.0, 1.0, 9801.0};
    const Triples t = closure_triples(x, p);
    CHECK(t.SSI == doctest::Approx(882.09).epsilon(1e-12));
    CHECK(t.ISI == doctest::Approx(8.91).epsilon(1e-12));

    const Triples none = closure_triples({10.0, 0.0, 1.0, 9801.0}, p);
    CHECK(none.SSI == 0.0);
    CHECK(none.ISI == 0.0);

    const Triples df = closure_triples({0.0, 0.0, 0.0, 999000.0}, p);
    CHECK(df.SSI == 0.0);
    CHECK(df.ISI == 0.0);
}

TEST_CASE("degenerate closures throw in validation mode and stay finite in rollouts") {
    SystemParams p;
    const ModelState all_infected{1000.0, 5.0, 1.0, 1.0};
    CHECK_THROWS_AS(closure_triples(all_infected, p, ClosureMode::Validate),
                    DegenerateState);
    const Triples t = closure_triples(all_infected, p, ClosureMode::Rollout);
    CHECK(t.SSI == 0.0);
    CHECK(t.ISI == 0.0);
}

TEST_CASE("constant-control right-hand side") {
    SystemParams p;
    const ModelState x{10.0, 99.0, 1.0, 9801.0};
    const Derivative d = rhs_constant(x, p, {0.0, 0.0});
    CHECK(d.dI == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(d.dSI == doctest::Approx(-20.582).epsilon(1e-12));
    CHECK(d.dII == doctest::Approx(19.582).epsilon(1e-12));
    CHECK(d.dSS == doctest::Approx(21.582).epsilon(1e-12));
}

TEST_CASE("disease-free state is absorbing") {
    SystemParams p;
    const ModelState df{0.0, 0.0, 0.0, 999000.0};
    for (const ControlInput u : {ControlInput{0.0, 0.0}, ControlInput{5.0, 0.01},
                                 ControlInput{100.0, 2.0}}) {
        const Derivative d = rhs_constant(df, p, u);
        CHECK(d.dI == 0.0);
        CHECK(d.dSI == 0.0);
        CHECK(d.dII == 0.0);
        CHECK(std::abs(d.dSS) == 0.0);
    }
}

TEST_CASE("edge conservation under zero control") {
    SystemParams p;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uI(0.0, 900.0), up(0.0, 20000.0);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelState x{uI(rng), up(rng) * 0.01, up(rng) * 0.01, up(rng)};
        const Derivative d = rhs_constant(x, p, {0.0, 0.0}, ClosureMode::Rollout);
        const double mag = std::max({1.0, std::abs(d.dSI), std::abs(d.dII),
                                     std::abs(d.dSS)});
        CHECK(std::abs(2.0 * d.dSI + d.dII + d.dSS) <= 1e-9 * mag);
    }
}

TEST_CASE("no derivative drives a zero coordinate negative") {
    SystemParams p;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uI(0.0, 900.0), up(0.0, 10000.0);
    for (int trial = 0; trial < 100; ++trial) {
        ModelState x{uI(rng), up(rng), up(rng), up(rng)};
        switch (trial % 4) {
            case 0: x.I = 0.0; break;
            case 1: x.SI = 0.0; break;
            case 2: x.II = 0.0; break;
            case 3: x.SS = 0.0; break;
        }
        const Derivative d = rhs_constant(x, p, {1.0, 0.5}, ClosureMode::Rollout);
        if (x.I == 0.0) CHECK(d.dI >= -1e-12);
        if (x.SI == 0.0) CHECK(d.dSI >= -1e-12);
        if (x.II == 0.0) CHECK(d.dII >= -1e-12);
        if (x.SS == 0.0) CHECK(d.dSS >= -1e-12);
    }
}

TEST_CASE("receding-horizon right-hand side") {
    SystemParams p;
    const ModelState x{10.0, 99.0, 1.0, 9801.0};

    SUBCASE("agrees with the constant-control system for u2 >= 0") {
        for (double u2 : {0.0, 0.001, 0.3}) {
            const Derivative a = rhs_constant(x, p, {2.0, u2});
            const Derivative b = rhs_nmpc(x, p, {2.0, u2});
            CHECK(a.dI == b.dI);
            CHECK(a.dSI == b.dSI);
            CHECK(a.dII == b.dII);
            CHECK(a.dSS == doctest::Approx(b.dSS).epsilon(1e-14));
        }
    }

    SUBCASE("negative u2 deletes SS edges proportionally") {
        const Derivative d = rhs_nmpc(x, p, {0.0, -0.001});
        CHECK(d.dSS == doctest::Approx(21.582 - 0.001 * 9801.0).epsilon(1e-12));
        CHECK(d.dI == doctest::Approx(-0.1).epsilon(1e-12));
        CHECK(d.dSI == doctest::Approx(-20.582).epsilon(1e-12));
        CHECK(d.dII == doctest::Approx(19.582).epsilon(1e-12));
    }

    SUBCASE("continuous in u2 at zero") {
        const double h = 1e-12;
        const Derivative left = rhs_nmpc(x, p, {1.0, -h});
        const Derivative mid = rhs_nmpc(x, p, {1.0, 0.0});
        const Derivative right = rhs_nmpc(x, p, {1.0, h});
        CHECK(std::abs(left.dSS - mid.dSS) <= 1e-5);
        CHECK(std::abs(right.dSS - mid.dSS) <= 1e-5);
    }

    SUBCASE("empty network is a fixed point") {
        const Derivative d = rhs_nmpc({0.0, 0.0, 0.0, 0.0}, p, {1.0, -1.0},
                                      ClosureMode::Rollout);
        CHECK(d.dI == 0.0);
        CHECK(d.dSI == 0.0);
        CHECK(d.dII == 0.0);
        CHECK(d.dSS == 0.0);
    }

    SUBCASE("literal SS coefficient drops one gamma SI inflow") {
        const Derivative cons = rhs_nmpc(x, p, {0.0, 0.0}, ClosureMode::Validate,
                                         SsCoefficient::Conserving);
        const Derivative lit = rhs_nmpc(x, p, {0.0, 0.0}, ClosureMode::Validate,
                                        SsCoefficient::LiteralPaper);
        CHECK(cons.dSS - lit.dSS == doctest::Approx(p.gamma * x.SI).epsilon(1e-12));
    }
}

TEST_CASE("state clamping") {
    SystemParams p;
    ModelState x{-1.0, -2.0, 3.0, 4.0};
    const double worst = clamp_state(x, p);
    CHECK(x.I == 0.0);
    CHECK(x.SI == 0.0);
    CHECK(x.II == 3.0);
    CHECK(x.SS == 4.0);
    CHECK(worst == doctest::Approx(2.0));

    ModelState big{1500.0, 0.0, 0.0, 5.0};
    clamp_state(big, p);
    CHECK(big.I == 1000.0);

    // Pair counts are rescaled onto the physical box when the implied mean
    // degree exceeds N-1.
    ModelState dense{0.0, 0.0, 0.0, 2e6};
    clamp_state(dense, p);
    CHECK(mean_degree(dense, p) <= 999.0 + 1e-9);
}

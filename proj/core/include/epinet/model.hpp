#pragma once

#include <cstdint>

namespace epinet {

// Population and epidemic description. Rates are per unit time.
struct SystemParams {
    int N = 1000;        // population size, >= 3
    double tau = 0.1;    // per-contact infection rate, >= 0
    double gamma = 1.0;  // recovery rate, > 0
    double I0 = 10.0;    // initial infected count, in [0, N]
    double n0 = 10.0;    // initial mean degree, in (0, N-1]

    void validate() const; // throws ConfigError on violation
};

// Pairwise state: singles [I] and ordered-pair counts [SI], [II], [SS].
// Each undirected edge is counted twice within its type, so the mean
// degree is (2 SI + SS + II) / N.
struct ModelState {
    double I = 0.0;
    double SI = 0.0;
    double II = 0.0;
    double SS = 0.0;
};

// u1: rate of cutting SI edges (>= 0).
// u2: rate of creating SS edges; may be negative in the receding-horizon
//     system, where negative values delete SS edges instead.
struct ControlInput {
    double u1 = 0.0;
    double u2 = 0.0;
};

struct Derivative {
    double dI = 0.0;
    double dSI = 0.0;
    double dII = 0.0;
    double dSS = 0.0;
};

struct Triples {
    double SSI = 0.0;
    double ISI = 0.0;
};

// Validate: degenerate denominators throw DegenerateState.
// Rollout: degenerate closures evaluate to zero so optimizer probes of
//          extreme controls never abort.
enum class ClosureMode { Validate, Rollout };

// The SS equation of the receding-horizon system: Conserving uses the
// 2*gamma*SI recovery inflow required by edge conservation; LiteralPaper
// keeps the printed gamma*SI coefficient.
enum class SsCoefficient { Conserving, LiteralPaper };

// Denominator guard for the closures (applied to both n and N - I).
inline constexpr double kClosureGuard = 1e-9;

double mean_degree(const ModelState& state, const SystemParams& params);

// Mean-field pair initialization: [AB](0) = n0 [A](0) [B](0) / N.
// Reproduces mean degree n0 exactly.
ModelState initial_state(const SystemParams& params);

// Triple closures SSI = ((n-1)/n) SS SI / (N-I), ISI = ((n-1)/n) SI^2 / (N-I).
Triples closure_triples(const ModelState& state, const SystemParams& params,
                        ClosureMode mode = ClosureMode::Validate);

// Constant-control system; requires u2 >= 0.
Derivative rhs_constant(const ModelState& state, const SystemParams& params,
                        const ControlInput& u,
                        ClosureMode mode = ClosureMode::Validate);

// Receding-horizon system; u2 may be negative. For u2 >= 0 and the
// Conserving coefficient it agrees with rhs_constant.
Derivative rhs_nmpc(const ModelState& state, const SystemParams& params,
                    const ControlInput& u,
                    ClosureMode mode = ClosureMode::Validate,
                    SsCoefficient ss = SsCoefficient::Conserving);

// Clamps all coordinates to [0, inf) and I to [0, N].
// Returns the largest adjustment applied to any coordinate.
double clamp_state(ModelState& state, const SystemParams& params);

} // namespace epinet

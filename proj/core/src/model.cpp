#include "epinet/model.hpp"

#include "epinet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace epinet {

void SystemParams::validate() const {
    if (N < 3) throw ConfigError("system.N must be >= 3, got " + std::to_string(N));
    if (!(tau >= 0.0)) throw ConfigError("system.tau must be >= 0");
    if (!(gamma > 0.0)) throw ConfigError("system.gamma must be > 0");
    if (!(I0 >= 0.0 && I0 <= N)) throw ConfigError("system.I0 must be in [0, N]");
    if (!(n0 > 0.0 && n0 <= N - 1.0)) throw ConfigError("system.n0 must be in (0, N-1]");
}

double mean_degree(const ModelState& state, const SystemParams& params) {
    return (2.0 * state.SI + state.SS + state.II) / params.N;
}

ModelState initial_state(const SystemParams& params) {
    const double N = params.N;
    const double S0 = N - params.I0;
    ModelState x;
    x.I = params.I0;
    x.SI = params.n0 * params.I0 * S0 / N;
    x.II = params.n0 * params.I0 * params.I0 / N;
    x.SS = params.n0 * S0 * S0 / N;
    return x;
}

Triples closure_triples(const ModelState& state, const SystemParams& params,
                        ClosureMode mode) {
    const double n = mean_degree(state, params);
    const double S = params.N - state.I;
    if (n <= kClosureGuard || S <= kClosureGuard) {
        if (mode == ClosureMode::Validate)
            throw DegenerateState("closure denominators degenerate: n=" +
                                  std::to_string(n) + ", N-I=" + std::to_string(S));
        return {0.0, 0.0};
    }
    const double factor = (n - 1.0) / n / S;
    return {factor * state.SS * state.SI, factor * state.SI * state.SI};
}

namespace {

Derivative rhs_common(const ModelState& x, const SystemParams& p,
                      const ControlInput& u, const Triples& t) {
    Derivative d;
    d.dI = p.tau * x.SI - p.gamma * x.I;
    d.dSI = p.gamma * (x.II - x.SI) + p.tau * (t.SSI - t.ISI) - (p.tau + u.u1) * x.SI;
    d.dII = -2.0 * p.gamma * x.II + 2.0 * p.tau * (t.ISI + x.SI);
    return d;
}

} // namespace

Derivative rhs_constant(const ModelState& x, const SystemParams& p,
                        const ControlInput& u, ClosureMode mode) {
    const Triples t = closure_triples(x, p, mode);
    Derivative d = rhs_common(x, p, u, t);
    const double S = p.N - x.I;
    d.dSS = 2.0 * p.gamma * x.SI - 2.0 * p.tau * t.SSI + u.u2 * (S * (S - 1.0) - x.SS);
    return d;
}

Derivative rhs_nmpc(const ModelState& x, const SystemParams& p,
                    const ControlInput& u, ClosureMode mode, SsCoefficient ss) {
    const Triples t = closure_triples(x, p, mode);
    Derivative d = rhs_common(x, p, u, t);
    const double S = p.N - x.I;
    const double recovery = (ss == SsCoefficient::Conserving ? 2.0 : 1.0) * p.gamma * x.SI;
    d.dSS = recovery - 2.0 * p.tau * t.SSI +
            std::max(u.u2, 0.0) * (S * (S - 1.0) - x.SS) +
            std::min(u.u2, 0.0) * x.SS;
    return d;
}

double clamp_state(ModelState& state, const SystemParams& params) {
    double worst = 0.0;
    const auto clamp = [&worst](double& v, double lo, double hi) {
        const double c = std::clamp(v, lo, hi);
        worst = std::max(worst, std::abs(c - v));
        v = c;
    };
    clamp(state.I, 0.0, static_cast<double>(params.N));
    const double inf = std::numeric_limits<double>::infinity();
    clamp(state.SI, 0.0, inf);
    clamp(state.II, 0.0, inf);
    clamp(state.SS, 0.0, inf);
    // Mean degree can never exceed N-1; rescale pair counts back onto the
    // physical box when a coarse step overshoots it.
    const double n = mean_degree(state, params);
    if (n > params.N - 1.0) {
        const double shrink = (params.N - 1.0) / n;
        worst = std::max(worst, (1.0 - shrink) *
                                    std::max({2.0 * state.SI, state.II, state.SS}));
        state.SI *= shrink;
        state.II *= shrink;
        state.SS *= shrink;
    }
    return worst;
}

} // namespace epinet

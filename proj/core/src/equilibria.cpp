#include "epinet/equilibria.hpp"

#include "epinet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace epinet {

const char* to_string(RegionClass c) {
    switch (c) {
        case RegionClass::EndemicStable: return "endemic_stable";
        case RegionClass::Oscillatory: return "oscillatory";
        case RegionClass::DiseaseFreeStable: return "disease_free_stable";
    }
    return "?";
}

ModelState disease_free_state(const SystemParams& params) {
    const double N = params.N;
    return {0.0, 0.0, 0.0, N * (N - 1.0)};
}

Mat4 disease_free_jacobian(const SystemParams& params, const ControlInput& u) {
    const double N = params.N;
    const double tau = params.tau;
    const double g = params.gamma;
    // Row 4, column 1 is the derivative of the u2 creation term,
    // -u2 (2N - 1); it does not enter the spectrum (column 4 couples
    // only through the -u2 diagonal entry).
    return Mat4{{{-g, tau, 0.0, 0.0},
                 {0.0, -g + tau * (N - 2.0) - (tau + u.u1), g, 0.0},
                 {0.0, 2.0 * tau, -2.0 * g, 0.0},
                 {-u.u2 * (2.0 * N - 1.0), 2.0 * g - 2.0 * tau * (N - 2.0), 0.0, -u.u2}}};
}

double transcritical_u1(const SystemParams& params) {
    return std::max(0.0, params.tau * (params.N - 2.0) - params.gamma);
}

namespace {

// Candidate endemic state reconstructed from a trial prevalence I via the
// steady-state reduction: SI = (gamma/tau) I, SS from the edge balance
// u2 ((N-I)(N-I-1) - SS) = 2 u1 SI, and II as the +sqrt branch of the
// quadratic obtained from the II equation.
std::optional<ModelState> endemic_candidate(double I, const SystemParams& p,
                                            const ControlInput& u) {
    if (!(I > 0.0) || !(I < p.N)) return std::nullopt;
    const double N = p.N;
    const double SI = p.gamma / p.tau * I;
    const double S = N - I;
    const double SS = S * (S - 1.0) - 2.0 * u.u1 * SI / u.u2;
    if (!(SS > 0.0) || !(SI > 0.0)) return std::nullopt;

    const double A = (SI + S) / (N * SI);
    const double B = p.gamma * S / (p.tau * N * SI * SI);
    const double C = 2.0 * SI + SS;
    const double D = (A - B * C) * (A - B * C) - 4.0 * B * (1.0 - A * C);
    if (D < 0.0) return std::nullopt;
    const double II = 0.5 * (A - B * C + std::sqrt(D)) / B;
    if (!(II >= 0.0) || !std::isfinite(II)) return std::nullopt;

    ModelState x{I, SI, II, SS};
    if (mean_degree(x, p) <= kClosureGuard) return std::nullopt;
    return x;
}

std::optional<double> endemic_residual(double I, const SystemParams& p,
                                       const ControlInput& u) {
    const auto x = endemic_candidate(I, p, u);
    if (!x) return std::nullopt;
    return rhs_constant(*x, p, u, ClosureMode::Rollout).dSI;
}

double state_scale(const ModelState& x) {
    return std::max({1.0, std::abs(x.I), std::abs(x.SI), std::abs(x.II), std::abs(x.SS)});
}

} // namespace

std::optional<ModelState> endemic_state(const SystemParams& params, const ControlInput& u) {
    if (!(params.tau > 0.0) || !(u.u2 > 0.0)) return std::nullopt;

    const double N = params.N;

    // 2000-point scan grid: half log-spaced (large u1/u2 ratios push the
    // endemic prevalence arbitrarily close to zero), half uniform.
    constexpr int kHalf = 1000;
    std::vector<double> grid;
    grid.reserve(2 * kHalf);
    const double lo_I = 1e-8;
    for (int j = 0; j < kHalf; ++j)
        grid.push_back(lo_I * std::pow(0.5 * N / lo_I, j / (kHalf - 1.0)));
    for (int j = 1; j <= kHalf; ++j) grid.push_back(N * j / (kHalf + 1.0));
    std::sort(grid.begin(), grid.end());

    std::vector<double> roots;
    std::optional<double> prev_r;
    double prev_I = 0.0;
    for (const double I : grid) {
        const auto r = endemic_residual(I, params, u);
        if (r && prev_r && ((*r > 0.0) != (*prev_r > 0.0))) {
            // Bisection to relative 1e-10 in I.
            double lo = prev_I, hi = I;
            double flo = *prev_r;
            while (hi - lo > 1e-10 * std::max(lo, 1.0)) {
                const double mid = 0.5 * (lo + hi);
                const auto fm = endemic_residual(mid, params, u);
                if (!fm) break;
                if ((*fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = *fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_I = I;
    }

    // Deduplicate near-identical roots.
    std::sort(roots.begin(), roots.end());
    std::vector<double> distinct;
    for (double r : roots)
        if (distinct.empty() || r - distinct.back() > 1e-6 * N) distinct.push_back(r);

    std::optional<ModelState> best;
    for (double I : distinct) {
        const auto x = endemic_candidate(I, params, u);
        if (!x || !(x->I > 0.0 && x->SI > 0.0 && x->II > 0.0 && x->SS > 0.0)) continue;
        const Derivative d = rhs_constant(*x, params, u, ClosureMode::Rollout);
        const double res = std::max({std::abs(d.dI), std::abs(d.dSI),
                                     std::abs(d.dII), std::abs(d.dSS)});
        if (res > 1e-6 * state_scale(*x)) continue;
        if (best) throw MultipleRoots("multiple positive endemic roots at u1=" +
                                      std::to_string(u.u1) + ", u2=" + std::to_string(u.u2));
        best = x;
    }
    return best;
}

Mat4 numeric_jacobian(const ModelState& x, const SystemParams& params, const ControlInput& u) {
    const double base[4] = {x.I, x.SI, x.II, x.SS};
    Mat4 J{};
    for (int j = 0; j < 4; ++j) {
        const double h = std::max(1e-6 * std::abs(base[j]), 1e-6);
        ModelState xp = x, xm = x;
        double* fields_p[4] = {&xp.I, &xp.SI, &xp.II, &xp.SS};
        double* fields_m[4] = {&xm.I, &xm.SI, &xm.II, &xm.SS};
        *fields_p[j] += h;
        *fields_m[j] -= h;
        const Derivative dp = rhs_constant(xp, params, u, ClosureMode::Validate);
        const Derivative dm = rhs_constant(xm, params, u, ClosureMode::Validate);
        const double col[4] = {(dp.dI - dm.dI) / (2.0 * h), (dp.dSI - dm.dSI) / (2.0 * h),
                               (dp.dII - dm.dII) / (2.0 * h), (dp.dSS - dm.dSS) / (2.0 * h)};
        for (int i = 0; i < 4; ++i) J[i][j] = col[i];
    }
    return J;
}

StabilityReport stability_report(const ModelState& x, const SystemParams& params,
                                 const ControlInput& u) {
    StabilityReport rep;
    rep.state = x;
    const Mat4 J = numeric_jacobian(x, params, u);
    rep.coeffs = char_coeffs(J);
    rep.eigs = quartic_roots(rep.coeffs[0], rep.coeffs[1], rep.coeffs[2], rep.coeffs[3]);

    const double rho = spectral_radius(rep.eigs);
    const double tol = 1e-8 * rho;
    bool any_marginal = false;
    bool all_stable = true;
    for (const auto& e : rep.eigs) {
        if (std::abs(e.real()) <= tol) any_marginal = true;
        if (!(e.real() < -tol)) all_stable = false;
    }
    if (rho == 0.0 || any_marginal)
        rep.classification = Stability::Marginal;
    else
        rep.classification = all_stable ? Stability::Stable : Stability::Unstable;
    return rep;
}

std::optional<HopfResidual> hopf_residual(const SystemParams& params, const ControlInput& u) {
    const auto x = endemic_state(params, u);
    if (!x) return std::nullopt;
    const auto b = char_coeffs(numeric_jacobian(*x, params, u));
    HopfResidual res;
    res.g = b[0] * b[3] * b[3] - b[1] * (b[2] * b[3] - b[1]);
    res.sign_ok = b[1] * b[3] > 0.0;
    return res;
}

std::vector<std::pair<double, double>> hopf_curve(const SystemParams& params,
                                                  const std::vector<double>& u1_grid,
                                                  std::pair<double, double> u2_range) {
    const auto [lo, hi] = u2_range;
    std::vector<std::pair<double, double>> curve;
    if (!(lo < hi)) return curve;

    constexpr int kSamples = 64;
    const bool log_spaced = lo > 0.0 && hi / lo > 100.0;
    const auto sample = [&](int i) {
        const double t = static_cast<double>(i) / (kSamples - 1);
        return log_spaced ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
    };

    for (double u1 : u1_grid) {
        std::optional<double> found;
        std::optional<HopfResidual> prev;
        double prev_u2 = 0.0;
        for (int i = 0; i < kSamples && !found; ++i) {
            const double u2 = sample(i);
            const auto r = hopf_residual(params, {u1, u2});
            if (r && prev && ((r->g > 0.0) != (prev->g > 0.0))) {
                double a = prev_u2, b = u2;
                double fa = prev->g;
                while (b - a > 1e-8 * std::max(a, 1e-300)) {
                    const double mid = 0.5 * (a + b);
                    const auto fm = hopf_residual(params, {u1, mid});
                    if (!fm) break;
                    if ((fm->g > 0.0) == (fa > 0.0)) {
                        a = mid;
                        fa = fm->g;
                    } else {
                        b = mid;
                    }
                }
                const double root = 0.5 * (a + b);
                const auto at_root = hopf_residual(params, {u1, root});
                if (at_root && at_root->sign_ok) found = root;
            }
            prev = r;
            prev_u2 = u2;
        }
        if (found) curve.emplace_back(u1, *found);
    }
    return curve;
}

RegionClass classify_region(const SystemParams& params, const ControlInput& u) {
    if (!(u.u2 > 0.0))
        throw ConfigError("classify_region requires u2 > 0");
    if (u.u1 > transcritical_u1(params)) return RegionClass::DiseaseFreeStable;
    const auto endemic = endemic_state(params, u);
    if (!endemic) return RegionClass::Oscillatory; // disease-free is unstable here
    const auto rep = stability_report(*endemic, params, u);
    // A marginal slow mode (|Re| below the eigenvalue tolerance) is not
    // evidence of instability; only a clearly unstable state oscillates.
    return rep.classification == Stability::Unstable ? RegionClass::Oscillatory
                                                     : RegionClass::EndemicStable;
}

} // namespace epinet

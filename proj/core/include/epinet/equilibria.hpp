#pragma once

#include "epinet/linalg.hpp"
#include "epinet/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace epinet {

enum class Stability { Stable, Unstable, Marginal };

struct StabilityReport {
    ModelState state;
    Spectrum eigs;
    std::array<double, 4> coeffs; // (b0, b1, b2, b3)
    Stability classification = Stability::Marginal;
};

enum class RegionClass { EndemicStable, Oscillatory, DiseaseFreeStable };

const char* to_string(RegionClass c);

// (0, 0, 0, N(N-1)): no infection, fully connected network.
ModelState disease_free_state(const SystemParams& params);

// Analytic Jacobian of the constant-control system at the disease-free
// state. Eigenvalues are -gamma, -u2 and those of the inner 2x2 block.
Mat4 disease_free_jacobian(const SystemParams& params, const ControlInput& u);

// Transcritical threshold tau (N-2) - gamma, clamped below at 0; the
// disease-free state is stable for u1 above it.
double transcritical_u1(const SystemParams& params);

// Endemic steady state of the constant-control system, if one exists.
// Requires tau > 0 and u.u2 > 0. Throws MultipleRoots if the residual scan
// finds more than one positive root.
std::optional<ModelState> endemic_state(const SystemParams& params, const ControlInput& u);

// Central finite differences of rhs_constant.
Mat4 numeric_jacobian(const ModelState& x, const SystemParams& params, const ControlInput& u);

StabilityReport stability_report(const ModelState& x, const SystemParams& params,
                                 const ControlInput& u);

struct HopfResidual {
    double g = 0.0;     // b0 b3^2 - b1 (b2 b3 - b1)
    bool sign_ok = false; // sign(b1) == sign(b3)
};

// Residual of the pure-imaginary-eigenvalue condition at the endemic
// state's Jacobian; nullopt if no endemic state exists at (u1, u2).
std::optional<HopfResidual> hopf_residual(const SystemParams& params, const ControlInput& u);

// For each u1 in the grid, bisects u2 over sign changes of the Hopf
// residual (sign condition enforced at the root). u1 values with no
// bracketing sign change are omitted.
std::vector<std::pair<double, double>> hopf_curve(const SystemParams& params,
                                                  const std::vector<double>& u1_grid,
                                                  std::pair<double, double> u2_range);

// Three-regime classification at a constant-control point; requires u2 > 0.
RegionClass classify_region(const SystemParams& params, const ControlInput& u);

} // namespace epinet

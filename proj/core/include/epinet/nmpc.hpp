#pragma once

#include "epinet/integrator.hpp"
#include "epinet/model.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace epinet {

// Shifted: cost term j uses the output after applying u(k+j|k), so all P
//          terms depend on the decision variables.
// Literal: cost term j uses the output at k+j before u(k+j|k) acts; the
//          j = 0 term is then a constant offset.
enum class CostIndexing { Shifted, Literal };

struct NmpcConfig {
    double M1 = 1.0;    // upper bound on u1, > 0
    double M2 = 0.001;  // bound on |u2|, >= 0
    double dt = 0.1;    // control step
    double T = 10.0;    // control-period length; T/dt must be integral
    int P = 5;          // prediction horizon, steps
    std::array<double, 4> lambdas{1e4, 1.0, 1.0, 1.0};
    double I_target = 0.0;
    double n_target = 10.0;
    double epsilon = 0.1;

    std::uint64_t seed = 42;
    CostIndexing indexing = CostIndexing::Shifted;
    SsCoefficient ss_coeff = SsCoefficient::Conserving;
    int substeps = 20;
    int max_iters = 500;
    int multistarts = 3; // random seeds in addition to the warm start

    void validate() const;
};

struct ControlResult {
    Trajectory trajectory;
    ControlSchedule applied_controls;
    double final_I = 0.0;
    double final_n = 0.0;
    bool controllable = false;
    std::vector<double> objective_history; // optimal J at each step
    bool stalled = false;                  // some optimize call hit the iteration cap
};

struct ControllabilityCheck {
    bool ok = false;
    double dev_I = 0.0;
    double dev_n = 0.0;
};

// Quadratic receding-horizon cost of a candidate control sequence, rolled
// forward with step_F on the receding-horizon system from x_k. Delta-u at
// j = 0 is taken relative to u_prev.
double objective_J(std::span<const ControlInput> seq, const ModelState& x_k,
                   const ControlInput& u_prev, const NmpcConfig& cfg,
                   const SystemParams& params);

// Projected-gradient descent with finite-difference gradients, warm start
// plus cfg.multistarts random admissible seeds; the best local minimum wins.
// Every returned step satisfies the bounds exactly.
std::vector<ControlInput> optimize_horizon(const ModelState& x_k, const ControlInput& u_prev,
                                           const NmpcConfig& cfg, const SystemParams& params,
                                           std::span<const ControlInput> warm = {},
                                           std::uint64_t step_index = 0,
                                           bool* stalled = nullptr);

// Full receding-horizon loop: optimize, apply the first control, shift.
ControlResult run_nmpc(const SystemParams& params, const NmpcConfig& cfg);

ControllabilityCheck check_controllability(const Trajectory& traj, const NmpcConfig& cfg);

} // namespace epinet

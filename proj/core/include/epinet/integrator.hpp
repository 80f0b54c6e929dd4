#pragma once

#include "epinet/model.hpp"

#include <utility>
#include <vector>

namespace epinet {

enum class SystemKind { Constant, Nmpc };

// Piecewise-constant control: steps[k] applies on [k dt, (k+1) dt).
struct ControlSchedule {
    double dt = 0.1;
    std::vector<ControlInput> steps;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ModelState> states;                 // one more than controls
    std::vector<ControlInput> controls;
    std::vector<std::pair<double, double>> outputs; // (I, n) aligned to states
};

struct IntegratorOptions {
    int substeps = 20;                  // RK4 substeps per control interval
    ClosureMode closure = ClosureMode::Rollout;
    SsCoefficient ss_coeff = SsCoefficient::Conserving;
    bool record_substeps = false;       // simulate(): sample inside intervals too
};

// One control interval of the discrete map x(k+1) = F(x(k), u(k)):
// fixed-step RK4 with opt.substeps inner steps, control held constant,
// result clamped to the physical box. Throws IntegrationFailure if any
// coordinate becomes non-finite.
ModelState step_F(const ModelState& x, const ControlInput& u, double dt,
                  const SystemParams& params, SystemKind kind,
                  const IntegratorOptions& opt = {});

// Output map h: (I, mean degree).
std::pair<double, double> output_h(const ModelState& x, const SystemParams& params);

// Repeated step_F from initial_state(params); records states and outputs at
// every control boundary (plus substep samples when requested).
Trajectory simulate(const SystemParams& params, const ControlSchedule& schedule,
                    SystemKind kind, const IntegratorOptions& opt = {});

} // namespace epinet

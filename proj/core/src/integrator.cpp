#include "epinet/integrator.hpp"

#include "epinet/errors.hpp"

#include <cmath>

namespace epinet {

namespace {

Derivative eval_rhs(const ModelState& x, const SystemParams& p, const ControlInput& u,
                    SystemKind kind, const IntegratorOptions& opt) {
    if (kind == SystemKind::Constant)
        return rhs_constant(x, p, u, opt.closure);
    return rhs_nmpc(x, p, u, opt.closure, opt.ss_coeff);
}

ModelState axpy(const ModelState& x, double h, const Derivative& d) {
    return {x.I + h * d.dI, x.SI + h * d.dSI, x.II + h * d.dII, x.SS + h * d.dSS};
}

bool finite(const ModelState& x) {
    return std::isfinite(x.I) && std::isfinite(x.SI) && std::isfinite(x.II) &&
           std::isfinite(x.SS);
}

ModelState rk4_substep(const ModelState& x, const ControlInput& u, double h,
                       const SystemParams& p, SystemKind kind,
                       const IntegratorOptions& opt) {
    const Derivative k1 = eval_rhs(x, p, u, kind, opt);
    const Derivative k2 = eval_rhs(axpy(x, 0.5 * h, k1), p, u, kind, opt);
    const Derivative k3 = eval_rhs(axpy(x, 0.5 * h, k2), p, u, kind, opt);
    const Derivative k4 = eval_rhs(axpy(x, h, k3), p, u, kind, opt);
    ModelState next;
    next.I = x.I + h / 6.0 * (k1.dI + 2.0 * k2.dI + 2.0 * k3.dI + k4.dI);
    next.SI = x.SI + h / 6.0 * (k1.dSI + 2.0 * k2.dSI + 2.0 * k3.dSI + k4.dSI);
    next.II = x.II + h / 6.0 * (k1.dII + 2.0 * k2.dII + 2.0 * k3.dII + k4.dII);
    next.SS = x.SS + h / 6.0 * (k1.dSS + 2.0 * k2.dSS + 2.0 * k3.dSS + k4.dSS);
    return next;
}

} // namespace

ModelState step_F(const ModelState& x, const ControlInput& u, double dt,
                  const SystemParams& params, SystemKind kind,
                  const IntegratorOptions& opt) {
    if (!(dt > 0.0)) throw IntegrationFailure("step_F requires dt > 0");
    const int S = opt.substeps > 0 ? opt.substeps : 1;
    const double h = dt / S;
    ModelState cur = x;
    for (int i = 0; i < S; ++i) {
        cur = rk4_substep(cur, u, h, params, kind, opt);
        if (!finite(cur)) throw IntegrationFailure("non-finite state during RK4 step");
        clamp_state(cur, params);
    }
    return cur;
}

std::pair<double, double> output_h(const ModelState& x, const SystemParams& params) {
    return {x.I, mean_degree(x, params)};
}

Trajectory simulate(const SystemParams& params, const ControlSchedule& schedule,
                    SystemKind kind, const IntegratorOptions& opt) {
    if (schedule.steps.empty())
        throw ConfigError("simulate requires a nonempty control schedule");
    if (!(schedule.dt > 0.0)) throw ConfigError("schedule dt must be > 0");

    Trajectory traj;
    ModelState cur = initial_state(params);
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(cur);
    traj.outputs.push_back(output_h(cur, params));

    const int S = opt.substeps > 0 ? opt.substeps : 1;
    for (const ControlInput& u : schedule.steps) {
        if (opt.record_substeps) {
            const double h = schedule.dt / S;
            for (int i = 0; i < S; ++i) {
                cur = step_F(cur, u, h, params, kind,
                             {1, opt.closure, opt.ss_coeff, false});
                t += h;
                traj.times.push_back(t);
                traj.states.push_back(cur);
                traj.controls.push_back(u);
                traj.outputs.push_back(output_h(cur, params));
            }
        } else {
            cur = step_F(cur, u, schedule.dt, params, kind, opt);
            t += schedule.dt;
            traj.times.push_back(t);
            traj.states.push_back(cur);
            traj.controls.push_back(u);
            traj.outputs.push_back(output_h(cur, params));
        }
    }
    return traj;
}

} // namespace epinet

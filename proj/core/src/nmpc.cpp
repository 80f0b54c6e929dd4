#include "epinet/nmpc.hpp"

#include "epinet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace epinet {

void NmpcConfig::validate() const {
    if (!(M1 > 0.0)) throw ConfigError("control.M1 must be > 0");
    if (!(M2 >= 0.0)) throw ConfigError("control.M2 must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("control.dt must be > 0");
    if (!(T > 0.0)) throw ConfigError("control.T must be > 0");
    const double k = T / dt;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
        throw ConfigError("control.T must be an integer multiple of control.dt");
    if (P < 1) throw ConfigError("control.P must be >= 1");
    for (double l : lambdas)
        if (!(l >= 0.0)) throw ConfigError("damping weights must be >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("targets.epsilon must be > 0");
    if (substeps < 1) throw ConfigError("integrator substeps must be >= 1");
}

double objective_J(std::span<const ControlInput> seq, const ModelState& x_k,
                   const ControlInput& u_prev, const NmpcConfig& cfg,
                   const SystemParams& params) {
    const IntegratorOptions opt{cfg.substeps, ClosureMode::Rollout, cfg.ss_coeff, false};
    const auto& l = cfg.lambdas;

    double J = 0.0;
    ModelState x = x_k;
    ControlInput prev = u_prev;
    auto y = output_h(x, params);
    for (const ControlInput& u : seq) {
        if (cfg.indexing == CostIndexing::Literal) {
            // Output at the current instant, before this control acts.
            J += l[0] * (y.first - cfg.I_target) * (y.first - cfg.I_target) +
                 l[2] * (y.second - cfg.n_target) * (y.second - cfg.n_target);
        }
        const double du1 = u.u1 - prev.u1;
        const double du2 = u.u2 - prev.u2;
        J += l[1] * du1 * du1 + l[3] * du2 * du2;

        x = step_F(x, u, cfg.dt, params, SystemKind::Nmpc, opt);
        y = output_h(x, params);
        if (cfg.indexing == CostIndexing::Shifted) {
            J += l[0] * (y.first - cfg.I_target) * (y.first - cfg.I_target) +
                 l[2] * (y.second - cfg.n_target) * (y.second - cfg.n_target);
        }
        prev = u;
    }
    return J;
}

namespace {

// The optimizer works in coordinates normalized to [0,1]^2P:
// u1 = z M1, u2 = (2z - 1) M2. The box projection is then a clamp and the
// mapped controls hit the bounds exactly.
struct BoxCoords {
    double M1, M2;
    int P;

    std::vector<ControlInput> decode(const std::vector<double>& z) const {
        std::vector<ControlInput> seq(P);
        for (int j = 0; j < P; ++j) {
            seq[j].u1 = std::clamp(z[2 * j], 0.0, 1.0) * M1;
            seq[j].u2 = (2.0 * std::clamp(z[2 * j + 1], 0.0, 1.0) - 1.0) * M2;
        }
        return seq;
    }

    std::vector<double> encode(std::span<const ControlInput> seq) const {
        std::vector<double> z(2 * P);
        for (int j = 0; j < P; ++j) {
            z[2 * j] = M1 > 0.0 ? seq[j].u1 / M1 : 0.0;
            z[2 * j + 1] = M2 > 0.0 ? 0.5 * (seq[j].u2 / M2 + 1.0) : 0.5;
        }
        return z;
    }
};

struct DescentResult {
    std::vector<double> z;
    double J = 0.0;
    bool converged = false;
};

DescentResult projected_gradient(std::vector<double> z, const BoxCoords& box,
                                 const ModelState& x_k, const ControlInput& u_prev,
                                 const NmpcConfig& cfg, const SystemParams& params) {
    const auto project = [](std::vector<double>& v) {
        for (double& c : v) c = std::clamp(c, 0.0, 1.0);
    };
    const auto eval = [&](const std::vector<double>& v) {
        return objective_J(box.decode(v), x_k, u_prev, cfg, params);
    };

    project(z);
    double J = eval(z);
    double alpha = 0.1;
    const int dim = static_cast<int>(z.size());
    std::vector<double> grad(dim), trial(dim);

    DescentResult result{z, J, false};
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const double fd_h = 1e-6;
        for (int i = 0; i < dim; ++i) {
            std::vector<double> zp = result.z, zm = result.z;
            zp[i] += fd_h;
            zm[i] -= fd_h;
            grad[i] = (eval(zp) - eval(zm)) / (2.0 * fd_h);
        }

        bool accepted = false;
        while (alpha > 1e-12) {
            for (int i = 0; i < dim; ++i) trial[i] = result.z[i] - alpha * grad[i];
            project(trial);
            const double Jt = eval(trial);
            if (Jt < result.J) {
                const double improvement = (result.J - Jt) / std::max(result.J, 1e-300);
                result.z = trial;
                result.J = Jt;
                accepted = true;
                alpha = std::min(alpha * 2.0, 1.0);
                if (improvement < 1e-8) {
                    result.converged = true;
                    return result;
                }
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            result.converged = true; // projected stationary point at FD resolution
            return result;
        }
    }
    return result;
}

} // namespace

std::vector<ControlInput> optimize_horizon(const ModelState& x_k, const ControlInput& u_prev,
                                           const NmpcConfig& cfg, const SystemParams& params,
                                           std::span<const ControlInput> warm,
                                           std::uint64_t step_index, bool* stalled) {
    cfg.validate();
    const BoxCoords box{cfg.M1, cfg.M2, cfg.P};

    std::vector<std::vector<double>> starts;
    if (warm.empty()) {
        starts.push_back(box.encode(std::vector<ControlInput>(cfg.P)));
    } else {
        starts.push_back(box.encode(warm));
    }

    std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * (step_index + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < cfg.multistarts; ++s) {
        std::vector<double> z(2 * cfg.P);
        for (double& c : z) c = unit(rng);
        starts.push_back(std::move(z));
    }

    DescentResult best;
    bool have_best = false;
    for (auto& z0 : starts) {
        DescentResult r = projected_gradient(std::move(z0), box, x_k, u_prev, cfg, params);
        if (!have_best || r.J < best.J) {
            best = std::move(r);
            have_best = true;
        }
    }
    if (stalled) *stalled = !best.converged;
    return box.decode(best.z);
}

ControlResult run_nmpc(const SystemParams& params, const NmpcConfig& cfg) {
    params.validate();
    cfg.validate();
    const int K = static_cast<int>(std::round(cfg.T / cfg.dt));
    const IntegratorOptions opt{cfg.substeps, ClosureMode::Rollout, cfg.ss_coeff, false};

    ControlResult result;
    result.applied_controls.dt = cfg.dt;

    ModelState x = initial_state(params);
    double t = 0.0;
    result.trajectory.times.push_back(t);
    result.trajectory.states.push_back(x);
    result.trajectory.outputs.push_back(output_h(x, params));

    ControlInput u_prev{0.0, 0.0};
    std::vector<ControlInput> warm;
    for (int k = 0; k < K; ++k) {
        bool stalled = false;
        std::vector<ControlInput> seq =
            optimize_horizon(x, u_prev, cfg, params, warm, static_cast<std::uint64_t>(k),
                             &stalled);
        result.stalled = result.stalled || stalled;
        result.objective_history.push_back(objective_J(seq, x, u_prev, cfg, params));

        const ControlInput u = seq.front();
        x = step_F(x, u, cfg.dt, params, SystemKind::Nmpc, opt);
        t += cfg.dt;
        result.trajectory.times.push_back(t);
        result.trajectory.states.push_back(x);
        result.trajectory.controls.push_back(u);
        result.trajectory.outputs.push_back(output_h(x, params));
        result.applied_controls.steps.push_back(u);

        u_prev = u;
        // Warm start: shift one step, duplicate the last entry.
        warm.assign(seq.begin() + 1, seq.end());
        warm.push_back(seq.back());
    }

    const auto check = check_controllability(result.trajectory, cfg);
    result.final_I = result.trajectory.outputs.back().first;
    result.final_n = result.trajectory.outputs.back().second;
    result.controllable = check.ok;
    return result;
}

ControllabilityCheck check_controllability(const Trajectory& traj, const NmpcConfig& cfg) {
    if (traj.outputs.empty()) throw ConfigError("empty trajectory");
    const auto [I, n] = traj.outputs.back();
    ControllabilityCheck c;
    c.dev_I = std::abs(I - cfg.I_target);
    c.dev_n = std::abs(n - cfg.n_target);
    c.ok = c.dev_I <= cfg.epsilon && c.dev_n <= cfg.epsilon;
    return c;
}

} // namespace epinet

#pragma once

#include "epinet/nmpc.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace epinet {

struct SweepSpec {
    SystemParams base_params;
    NmpcConfig base_cfg;
    std::string axis = "system.tau"; // the only sweep axis currently supported
    std::vector<double> values;      // nonempty, sorted
};

struct TauSweepRow {
    double tau = 0.0;
    double I_T = 0.0;
    double n_T = 0.0;
    bool controllable = false;
    bool ok = true;          // row-level failures are recorded, not thrown
    std::string error;
};

struct CriticalBoundResult {
    double tau = 0.0;
    double M2 = 0.0;
    double M1_critical = 0.0;
    double bisection_tolerance = 0.0;
};

struct CriticalCurvePoint {
    double tau = 0.0;
    double M2 = 0.0;
    double M1_critical = 0.0;
    bool ok = true;
    std::string error;
};

// Final outputs of the (un)controlled system across an infection-rate grid.
std::vector<TauSweepRow> sweep_tau(const SweepSpec& spec, bool controlled, int threads = 0);

// Bisection on M1 over the controllability verdict of run_nmpc; endpoints
// must bracket (controllable at hi, not at lo) or BracketInvalid is thrown.
CriticalBoundResult critical_M1(double tau, double M2, NmpcConfig base_cfg,
                                SystemParams params, double lo, double hi,
                                double tol = 0.1);

// critical_M1 across a (tau, M2) grid; per-point failures are recorded.
std::vector<CriticalCurvePoint> critical_curves(const std::vector<double>& tau_grid,
                                                const std::vector<double>& M2_values,
                                                const NmpcConfig& cfg,
                                                const SystemParams& params, double lo,
                                                double hi, double tol = 0.1,
                                                int threads = 0);

// Highest controllable target mean degree (I target stays at cfg.I_target)
// for the given bounds, by bisection to the given absolute tolerance.
double achievable_target(double M1, double M2, double tau, NmpcConfig cfg,
                         SystemParams params, double tol = 0.1);

// Named studies with figure-caption defaults; writes CSV artifacts plus
// summary.json under out_dir and returns the summary. Known names:
// stepsize, damping, regionmap, resurgence, table2, fig3, fig4, fig5-left,
// fig6. Throws UnknownScenario otherwise.
nlohmann::json scenario_run(const std::string& name, const std::filesystem::path& out_dir,
                            SystemParams params, NmpcConfig cfg, bool plot = false,
                            int threads = 0);

// Runs fn(i) for i in [0, n) on a small worker pool; results are collected
// in input order regardless of completion order.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// JSON views of the effective configuration, used by summary.json files.
void to_json(nlohmann::json& j, const SystemParams& p);
void to_json(nlohmann::json& j, const NmpcConfig& c);

} // namespace epinet

#include "epinet/experiments.hpp"

#include "epinet/equilibria.hpp"
#include "epinet/errors.hpp"
#include "epinet/io.hpp"
#include "epinet/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace epinet {

using nlohmann::json;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<TauSweepRow> sweep_tau(const SweepSpec& spec, bool controlled, int threads) {
    if (spec.axis != "system.tau")
        throw ConfigError("unsupported sweep axis: " + spec.axis);
    if (spec.values.empty()) throw ConfigError("sweep values must be nonempty");
    if (!std::is_sorted(spec.values.begin(), spec.values.end()))
        throw ConfigError("sweep values must be sorted");

    std::vector<TauSweepRow> rows(spec.values.size());
    parallel_for(static_cast<int>(spec.values.size()), threads, [&](int i) {
        TauSweepRow& row = rows[i];
        row.tau = spec.values[i];
        try {
            SystemParams p = spec.base_params;
            p.tau = row.tau;
            if (controlled) {
                const ControlResult r = run_nmpc(p, spec.base_cfg);
                row.I_T = r.final_I;
                row.n_T = r.final_n;
                row.controllable = r.controllable;
            } else {
                const int k = static_cast<int>(std::round(spec.base_cfg.T / spec.base_cfg.dt));
                ControlSchedule zero{spec.base_cfg.dt, std::vector<ControlInput>(k)};
                const Trajectory traj = simulate(p, zero, SystemKind::Constant,
                                                 {spec.base_cfg.substeps});
                row.I_T = traj.outputs.back().first;
                row.n_T = traj.outputs.back().second;
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

namespace {

bool controllable_at(double M1, double tau, double M2, NmpcConfig cfg, SystemParams params) {
    cfg.M1 = M1;
    cfg.M2 = M2;
    params.tau = tau;
    return run_nmpc(params, cfg).controllable;
}

} // namespace

CriticalBoundResult critical_M1(double tau, double M2, NmpcConfig base_cfg,
                                SystemParams params, double lo, double hi, double tol) {
    if (!(lo < hi) || !(tol > 0.0)) throw ConfigError("critical_M1: need lo < hi, tol > 0");
    if (controllable_at(lo, tau, M2, base_cfg, params))
        throw BracketInvalid("critical_M1: already controllable at lo=" + format_num(lo));
    if (!controllable_at(hi, tau, M2, base_cfg, params))
        throw BracketInvalid("critical_M1: not controllable at hi=" + format_num(hi));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (controllable_at(mid, tau, M2, base_cfg, params))
            hi = mid;
        else
            lo = mid;
    }
    return {tau, M2, 0.5 * (lo + hi), tol};
}

std::vector<CriticalCurvePoint> critical_curves(const std::vector<double>& tau_grid,
                                                const std::vector<double>& M2_values,
                                                const NmpcConfig& cfg,
                                                const SystemParams& params, double lo,
                                                double hi, double tol, int threads) {
    if (tau_grid.empty() || M2_values.empty()) return {};
    std::vector<CriticalCurvePoint> points(tau_grid.size() * M2_values.size());
    parallel_for(static_cast<int>(points.size()), threads, [&](int idx) {
        CriticalCurvePoint& pt = points[idx];
        pt.M2 = M2_values[idx / tau_grid.size()];
        pt.tau = tau_grid[idx % tau_grid.size()];
        try {
            pt.M1_critical = critical_M1(pt.tau, pt.M2, cfg, params, lo, hi, tol).M1_critical;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    return points;
}

double achievable_target(double M1, double M2, double tau, NmpcConfig cfg,
                         SystemParams params, double tol) {
    cfg.M1 = M1;
    cfg.M2 = M2;
    params.tau = tau;
    const auto controllable_to = [&](double n_target) {
        NmpcConfig c = cfg;
        c.n_target = n_target;
        return run_nmpc(params, c).controllable;
    };

    double hi = params.n0; // no point targeting above the initial mean degree
    if (controllable_to(hi)) return hi;
    // Near-zero targets can fail by overshoot (the controller deletes links
    // past the target), so scan upward for a controllable lower bracket.
    double lo = -1.0;
    for (double cand : {0.2, 0.5, 1.0, 0.25 * hi, 0.5 * hi}) {
        if (!(cand < hi)) break;
        if (controllable_to(cand)) {
            lo = cand;
            break;
        }
    }
    if (lo < 0.0)
        throw NoAchievableTarget("no controllable mean-degree target below n0 (M1=" +
                                 format_num(M1) + ")");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (controllable_to(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void to_json(json& j, const SystemParams& p) {
    j = {{"N", p.N}, {"tau", p.tau}, {"gamma", p.gamma}, {"I0", p.I0}, {"n0", p.n0}};
}

void to_json(json& j, const NmpcConfig& c) {
    j = {{"M1", c.M1},
            {"M2", c.M2},
            {"dt", c.dt},
            {"T", c.T},
            {"P", c.P},
            {"lambda1", c.lambdas[0]},
            {"lambda2", c.lambdas[1]},
            {"lambda3", c.lambdas[2]},
            {"lambda4", c.lambdas[3]},
            {"I_target", c.I_target},
            {"n_target", c.n_target},
            {"epsilon", c.epsilon},
            {"seed", c.seed},
            {"cost_indexing", c.indexing == CostIndexing::Shifted ? "shifted" : "literal"},
            {"ss_coefficient",
             c.ss_coeff == SsCoefficient::Conserving ? "conserving" : "literal-paper"},
            {"substeps", c.substeps},
            {"max_iters", c.max_iters},
            {"multistarts", c.multistarts}};
}

namespace {

void write_summary(const std::filesystem::path& out_dir, json summary) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "summary.json");
    out << summary.dump(2) << "\n";
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const SystemParams& params) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const ModelState& x = traj.states[i];
        ControlInput u{};
        if (!traj.controls.empty())
            u = traj.controls[std::min(i, traj.controls.size() - 1)];
        rows.push_back({format_num(traj.times[i]), format_num(x.I), format_num(x.SI),
                        format_num(x.II), format_num(x.SS),
                        format_num(mean_degree(x, params)), format_num(u.u1),
                        format_num(u.u2)});
    }
    write_csv(path, {"t", "I", "SI", "II", "SS", "n", "u1", "u2"}, rows);
}

void plot_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                     const std::string& title) {
    PlotSeries si{"I(t)", traj.times, {}};
    PlotSeries sn{"n(t)", traj.times, {}};
    for (const auto& [I, n] : traj.outputs) {
        si.y.push_back(I);
        sn.y.push_back(n);
    }
    write_svg_plot(path, title, "t", "I, n", {si, sn});
}

json run_and_dump(const std::filesystem::path& out_dir, const std::string& stem,
                  const SystemParams& params, const NmpcConfig& cfg, bool plot) {
    const ControlResult r = run_nmpc(params, cfg);
    write_trajectory_csv(out_dir / (stem + ".csv"), r.trajectory, params);
    if (plot) plot_trajectory(out_dir / (stem + ".svg"), r.trajectory, stem);
    return {{"final_I", r.final_I},
            {"final_n", r.final_n},
            {"controllable", r.controllable},
            {"stalled", r.stalled}};
}

json scenario_stepsize(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                       bool plot) {
    p.tau = 1.0;
    cfg.M1 = 7.8;
    cfg.M2 = 0.5;
    json runs = json::array();
    std::vector<std::vector<std::string>> rows;
    for (double dt : {0.2, 1.0, 5.0, 10.0}) {
        NmpcConfig c = cfg;
        c.dt = dt;
        // Keep the lookahead span and the inner RK4 step comparable across
        // coarse control steps: about 0.5 time units of horizon, h <= 0.0125.
        c.P = std::max(1, static_cast<int>(std::ceil(0.5 / dt)));
        c.substeps = std::max(c.substeps, static_cast<int>(std::ceil(dt / 0.0125)));
        json r = run_and_dump(out, "stepsize_dt" + format_num(dt), p, c, plot);
        r["dt"] = dt;
        rows.push_back({format_num(dt), format_num(r["final_I"].get<double>()),
                        format_num(r["final_n"].get<double>()),
                        r["controllable"].get<bool>() ? "1" : "0"});
        runs.push_back(std::move(r));
    }
    write_csv(out / "stepsize.csv", {"dt", "I_T", "n_T", "controllable"}, rows);
    return {{"runs", runs}};
}

json scenario_damping(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                      bool plot) {
    p.tau = 1.0;
    cfg.M1 = 7.8;
    cfg.M2 = 0.5;
    cfg.dt = 0.1;
    struct Case {
        const char* name;
        std::array<double, 4> lambdas;
    };
    // Three weight profiles: heavy increment damping, pure eradication
    // focus, and connectivity focus with free control adjustment.
    const Case cases[] = {{"damping_continuous", {1e2, 1e4, 1.0, 1e4}},
                          {"damping_dashed", {1e4, 1.0, 0.0, 0.0}},
                          {"damping_dotted", {0.0, 0.0, 1e4, 0.0}}};
    json runs = json::array();
    std::vector<std::vector<std::string>> rows;
    for (const Case& c : cases) {
        NmpcConfig nc = cfg;
        nc.lambdas = c.lambdas;
        json r = run_and_dump(out, c.name, p, nc, plot);
        r["case"] = c.name;
        rows.push_back({c.name, format_num(r["final_I"].get<double>()),
                        format_num(r["final_n"].get<double>()),
                        r["controllable"].get<bool>() ? "1" : "0"});
        runs.push_back(std::move(r));
    }
    write_csv(out / "damping.csv", {"case", "I_T", "n_T", "controllable"}, rows);
    return {{"runs", runs}};
}

json scenario_regionmap(const std::filesystem::path& out, SystemParams p,
                        const NmpcConfig&, int threads) {
    // (u1, u2) grid straddling both the transcritical line and the Hopf curve.
    const double u1_star = transcritical_u1(p);
    constexpr int kGrid = 20;
    std::vector<double> u1s(kGrid), u2s(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        u1s[i] = (i + 1) * 1.1 * u1_star / kGrid;
        u2s[i] = 1e-3 * std::pow(5.0 / 1e-3, i / (kGrid - 1.0)); // log in [1e-3, 5]
    }
    std::vector<std::string> classes(kGrid * kGrid);
    parallel_for(kGrid * kGrid, threads, [&](int idx) {
        const ControlInput u{u1s[idx / kGrid], u2s[idx % kGrid]};
        classes[idx] = to_string(classify_region(p, u));
    });

    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            rows.push_back({format_num(u1s[i]), format_num(u2s[j]), classes[i * kGrid + j]});
    write_csv(out / "regionmap.csv", {"u1", "u2", "class"}, rows);

    std::vector<double> hopf_grid;
    for (int i = 1; i <= 30; ++i) hopf_grid.push_back(u1_star * i / 31.0);
    const auto curve = hopf_curve(p, hopf_grid, {1e-3, 5.0});
    std::vector<std::vector<std::string>> hopf_rows;
    for (const auto& [u1, u2] : curve)
        hopf_rows.push_back({format_num(u1), format_num(u2)});
    write_csv(out / "hopf_curve.csv", {"u1", "u2_star"}, hopf_rows);

    std::set<std::string> distinct(classes.begin(), classes.end());
    return {{"transcritical_u1", u1_star},
            {"classes_found", json(distinct)},
            {"hopf_points", curve.size()}};
}

json scenario_resurgence(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                         bool plot) {
    // Aggressive SI cutting nearly eradicates the infection, but link
    // creation reconnects the network past the epidemic threshold while a
    // trace of infection survives, so prevalence bounces back.
    p.tau = 0.1;
    const ControlInput u{30.0, 0.05};
    const double T = 200.0;
    const double dt = 0.5;
    ControlSchedule sched{dt, std::vector<ControlInput>(static_cast<std::size_t>(T / dt), u)};
    const Trajectory traj =
        simulate(p, sched, SystemKind::Constant, {std::max(cfg.substeps, 50)});
    write_trajectory_csv(out / "resurgence.csv", traj, p);
    if (plot) plot_trajectory(out / "resurgence.svg", traj, "resurgence");

    double min_I = traj.outputs.front().first;
    double peak_after_dip = 0.0;
    for (const auto& [I, n] : traj.outputs) {
        min_I = std::min(min_I, I);
        if (min_I < 0.1 * p.I0) peak_after_dip = std::max(peak_after_dip, I);
    }
    return {{"u1", u.u1}, {"u2", u.u2}, {"T", T},
            {"min_I", min_I}, {"peak_after_dip", peak_after_dip}};
}

json scenario_fig3(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                   int threads) {
    cfg.M1 = 1.0;
    cfg.M2 = 0.001;
    cfg.dt = 0.1;
    SweepSpec spec{p, cfg, "system.tau", {}};
    for (int i = 1; i <= 20; ++i) spec.values.push_back(0.05 * i); // 0.05 .. 1.0

    for (bool controlled : {false, true}) {
        const auto rows = sweep_tau(spec, controlled, threads);
        std::vector<std::vector<std::string>> csv;
        for (const auto& r : rows)
            csv.push_back({format_num(r.tau), format_num(r.I_T), format_num(r.n_T),
                           r.ok ? "" : r.error});
        write_csv(out / (controlled ? "fig3_controlled.csv" : "fig3_uncontrolled.csv"),
                  {"tau", "I_T", "n_T", "error"}, csv);
    }
    return {{"points", spec.values.size()}};
}

json scenario_fig4(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                   bool plot) {
    p.tau = 2.0;
    cfg.M1 = 18.0;
    cfg.M2 = 0.001;
    cfg.dt = 0.1;
    return run_and_dump(out, "fig4", p, cfg, plot);
}

json scenario_fig5_left(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                        int threads) {
    std::vector<double> taus;
    for (int i = 1; i <= 30; ++i) taus.push_back(0.1 * i);
    const std::vector<double> m2s{0.001, 0.1, 0.5};
    const auto points = critical_curves(taus, m2s, cfg, p, 0.0, 60.0, 0.1, threads);
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : points)
        rows.push_back({format_num(pt.tau), format_num(pt.M2), format_num(pt.M1_critical),
                        pt.ok ? "" : pt.error});
    write_csv(out / "fig5_left.csv", {"tau", "M2", "M1_critical", "error"}, rows);
    return {{"points", points.size()}};
}

json scenario_fig6(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg,
                   bool plot) {
    p.tau = 1.0;
    cfg.M1 = 6.0;
    cfg.M2 = 0.5;
    cfg.dt = 0.1;
    json runs = json::array();
    for (double target : {10.0, 7.5}) {
        NmpcConfig c = cfg;
        c.n_target = target;
        json r = run_and_dump(out, "fig6_ntarget" + format_num(target), p, c, plot);
        r["n_target"] = target;
        runs.push_back(std::move(r));
    }
    return {{"runs", runs}};
}

json scenario_table2(const std::filesystem::path& out, SystemParams p, NmpcConfig cfg) {
    cfg.M2 = 0.5;
    cfg.dt = 0.1;
    const std::vector<double> m1s{7.8, 7.5, 7.0, 6.5, 6.0, 5.5, 5.0, 4.5, 4.0, 3.5};
    std::vector<std::vector<std::string>> rows;
    json entries = json::array();
    for (double m1 : m1s) {
        const double n_star = achievable_target(m1, cfg.M2, 1.0, cfg, p, 0.1);
        rows.push_back({format_num(m1), format_num(n_star)});
        entries.push_back({{"M1", m1}, {"n_star", n_star}});
    }
    write_csv(out / "table2.csv", {"M1", "n_star"}, rows);
    return {{"entries", entries}};
}

} // namespace

json scenario_run(const std::string& name, const std::filesystem::path& out_dir,
                  SystemParams params, NmpcConfig cfg, bool plot, int threads) {
    params.validate();
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    json result;
    if (name == "stepsize")
        result = scenario_stepsize(out_dir, params, cfg, plot);
    else if (name == "damping")
        result = scenario_damping(out_dir, params, cfg, plot);
    else if (name == "regionmap")
        result = scenario_regionmap(out_dir, params, cfg, threads);
    else if (name == "resurgence")
        result = scenario_resurgence(out_dir, params, cfg, plot);
    else if (name == "fig3")
        result = scenario_fig3(out_dir, params, cfg, threads);
    else if (name == "fig4")
        result = scenario_fig4(out_dir, params, cfg, plot);
    else if (name == "fig5-left")
        result = scenario_fig5_left(out_dir, params, cfg, threads);
    else if (name == "fig6")
        result = scenario_fig6(out_dir, params, cfg, plot);
    else if (name == "table2")
        result = scenario_table2(out_dir, params, cfg);
    else
        throw UnknownScenario("unknown scenario: " + name);

    json summary{{"scenario", name},
                 {"system", json(params)},
                 {"control", json(cfg)},
                 {"result", result}};
    write_summary(out_dir, summary);
    return summary;
}

} // namespace epinet

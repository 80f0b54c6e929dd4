// Command-line front end: parses a flat key=value configuration, dispatches
// to the simulation / equilibria / controller / experiment operations and
// serializes results as CSV + summary.json (optionally SVG plots).
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "epinet/equilibria.hpp"
#include "epinet/errors.hpp"
#include "epinet/experiments.hpp"
#include "epinet/io.hpp"
#include "epinet/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using epinet::Config;
using epinet::format_num;
using nlohmann::json;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    bool plot = false;
    bool literal_paper_ss = false;
    std::string cost_indexing = "shifted";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "flat key=value configuration file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "seed for the optimizer multi-starts");
    cmd->add_flag("--plot", opts.plot, "also emit SVG line plots");
    cmd->add_flag("--literal-paper-ss", opts.literal_paper_ss,
                  "use the literal gamma*SI coefficient in the controlled SS equation");
    cmd->add_option("--cost-indexing", opts.cost_indexing, "shifted|literal")
        ->check(CLI::IsMember({"shifted", "literal"}));
    cmd->add_option("--threads", opts.threads, "worker threads for sweeps (0 = auto)");
}

Config load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) return {};
    return Config::parse_file(opts.config_path);
}

epinet::SystemParams read_params(Config& cfg) {
    epinet::SystemParams p;
    p.N = cfg.get_int("system.N", p.N);
    p.tau = cfg.get_double("system.tau", p.tau);
    p.gamma = cfg.get_double("system.gamma", p.gamma);
    p.I0 = cfg.get_double("system.I0", p.I0);
    p.n0 = cfg.get_double("system.n0", p.n0);
    p.validate();
    return p;
}

epinet::NmpcConfig read_nmpc(Config& cfg, const CommonOpts& opts,
                             const epinet::SystemParams& params, bool require_M1) {
    epinet::NmpcConfig c;
    if (require_M1 && !cfg.has("control.M1"))
        throw epinet::ConfigError("missing config key: control.M1");
    c.M1 = cfg.get_double("control.M1", c.M1);
    c.M2 = cfg.get_double("control.M2", c.M2);
    c.dt = cfg.get_double("control.dt", c.dt);
    c.T = cfg.get_double("control.T", c.T);
    c.P = cfg.get_int("control.P", c.P);
    c.substeps = cfg.get_int("control.substeps", c.substeps);
    c.max_iters = cfg.get_int("control.max_iters", c.max_iters);
    c.multistarts = cfg.get_int("control.multistarts", c.multistarts);
    c.lambdas[0] = cfg.get_double("damping.lambda1", c.lambdas[0]);
    c.lambdas[1] = cfg.get_double("damping.lambda2", c.lambdas[1]);
    c.lambdas[2] = cfg.get_double("damping.lambda3", c.lambdas[2]);
    c.lambdas[3] = cfg.get_double("damping.lambda4", c.lambdas[3]);
    c.I_target = cfg.get_double("targets.I", c.I_target);
    c.n_target = cfg.get_double("targets.n", params.n0);
    c.epsilon = cfg.get_double("targets.epsilon", c.epsilon);
    c.seed = opts.seed;
    c.indexing = opts.cost_indexing == "literal" ? epinet::CostIndexing::Literal
                                                 : epinet::CostIndexing::Shifted;
    c.ss_coeff = opts.literal_paper_ss ? epinet::SsCoefficient::LiteralPaper
                                       : epinet::SsCoefficient::Conserving;
    c.validate();
    return c;
}

json effective_config(const epinet::SystemParams& p, const epinet::NmpcConfig& c,
                      const CommonOpts& opts) {
    return {{"system", json(p)},
            {"control", json(c)},
            {"seed", opts.seed},
            {"plot", opts.plot},
            {"out", opts.out_dir}};
}

void write_summary(const std::filesystem::path& dir, const json& summary) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
}

void write_trajectory(const std::filesystem::path& path, const epinet::Trajectory& traj,
                      const epinet::SystemParams& params) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& x = traj.states[i];
        epinet::ControlInput u{};
        if (!traj.controls.empty())
            u = traj.controls[std::min(i, traj.controls.size() - 1)];
        rows.push_back({format_num(traj.times[i]), format_num(x.I), format_num(x.SI),
                        format_num(x.II), format_num(x.SS),
                        format_num(epinet::mean_degree(x, params)), format_num(u.u1),
                        format_num(u.u2)});
    }
    epinet::write_csv(path, {"t", "I", "SI", "II", "SS", "n", "u1", "u2"}, rows);
}

void plot_outputs(const std::filesystem::path& path, const epinet::Trajectory& traj,
                  const std::string& title) {
    epinet::PlotSeries si{"I(t)", traj.times, {}};
    epinet::PlotSeries sn{"n(t)", traj.times, {}};
    for (const auto& [I, n] : traj.outputs) {
        si.y.push_back(I);
        sn.y.push_back(n);
    }
    epinet::write_svg_plot(path, title, "t", "I, n", {si, sn});
}

epinet::ControlSchedule read_schedule(Config& cfg, const epinet::NmpcConfig& nmpc) {
    epinet::ControlSchedule sched;
    sched.dt = nmpc.dt;
    const int k = static_cast<int>(std::round(nmpc.T / nmpc.dt));
    const std::string file = cfg.get_string("control.schedule_file", "");
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw epinet::ConfigError("cannot open schedule file: " + file);
        double u1, u2;
        char sep;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 'u') continue;
            std::istringstream ls(line);
            if (ls >> u1) {
                ls >> sep >> u2;
                sched.steps.push_back({u1, u2});
            }
        }
        if (sched.steps.empty())
            throw epinet::ConfigError("schedule file has no control rows: " + file);
    } else {
        const double u1 = cfg.get_double("control.u1", 0.0);
        const double u2 = cfg.get_double("control.u2", 0.0);
        if (u1 < 0.0) throw epinet::ConfigError("control.u1 must be >= 0");
        if (u2 < 0.0)
            throw epinet::ConfigError("control.u2 must be >= 0 in the constant-control system");
        sched.steps.assign(k, {u1, u2});
    }
    return sched;
}

int cmd_simulate(const CommonOpts& opts, bool fine) {
    Config cfg = load_config(opts);
    const auto params = read_params(cfg);
    const auto nmpc = read_nmpc(cfg, opts, params, false);
    const auto sched = read_schedule(cfg, nmpc);
    cfg.reject_unknown();

    epinet::IntegratorOptions iopt{nmpc.substeps, epinet::ClosureMode::Rollout,
                                   nmpc.ss_coeff, fine};
    const auto traj = epinet::simulate(params, sched, epinet::SystemKind::Constant, iopt);

    const std::filesystem::path out = opts.out_dir;
    write_trajectory(out / "trajectory.csv", traj, params);
    if (opts.plot) plot_outputs(out / "trajectory.svg", traj, "simulate");
    json summary = {{"command", "simulate"},
                    {"config", effective_config(params, nmpc, opts)},
                    {"final_I", traj.outputs.back().first},
                    {"final_n", traj.outputs.back().second}};
    write_summary(out, summary);
    return 0;
}

int cmd_regions(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    const auto params = read_params(cfg);

    const double u1_star = epinet::transcritical_u1(params);
    const double u1_min = cfg.get_double("regions.u1_min", 0.0);
    const double u1_max = cfg.get_double("regions.u1_max", 1.1 * std::max(u1_star, 1.0));
    const int u1_count = cfg.get_int("regions.u1_count", 20);
    const double u2_min = cfg.get_double("regions.u2_min", 1e-3);
    const double u2_max = cfg.get_double("regions.u2_max", 5.0);
    const int u2_count = cfg.get_int("regions.u2_count", 20);
    const int hopf_count = cfg.get_int("regions.hopf_count", 30);
    cfg.reject_unknown();
    if (u1_count < 1 || u2_count < 1 || !(u2_min > 0.0) || !(u2_min <= u2_max))
        throw epinet::ConfigError("invalid regions grid");

    std::vector<std::vector<std::string>> rows(u1_count * u2_count);
    epinet::parallel_for(u1_count * u2_count, opts.threads, [&](int idx) {
        const int i = idx / u2_count, j = idx % u2_count;
        const double u1 = u1_count == 1 ? u1_min
                                        : u1_min + (u1_max - u1_min) * i / (u1_count - 1.0);
        const double u2 = u2_count == 1
                              ? u2_min
                              : u2_min * std::pow(u2_max / u2_min, j / (u2_count - 1.0));
        const auto cls = epinet::classify_region(params, {u1, u2});
        rows[idx] = {format_num(u1), format_num(u2), epinet::to_string(cls)};
    });

    const std::filesystem::path out = opts.out_dir;
    epinet::write_csv(out / "regionmap.csv", {"u1", "u2", "class"}, rows);

    std::vector<double> hopf_grid;
    for (int i = 1; i <= hopf_count; ++i)
        hopf_grid.push_back(u1_min + (u1_max - u1_min) * i / (hopf_count + 1.0));
    const auto curve = epinet::hopf_curve(params, hopf_grid, {u2_min, u2_max});
    std::vector<std::vector<std::string>> hopf_rows;
    for (const auto& [u1, u2] : curve) hopf_rows.push_back({format_num(u1), format_num(u2)});
    epinet::write_csv(out / "hopf_curve.csv", {"u1", "u2_star"}, hopf_rows);

    json summary = {{"command", "regions"},
                    {"system", json(params)},
                    {"transcritical_u1", u1_star},
                    {"hopf_points", curve.size()},
                    {"seed", opts.seed}};
    write_summary(out, summary);
    return 0;
}

int cmd_nmpc(const CommonOpts& opts) {
    Config cfg = load_config(opts);
    const auto params = read_params(cfg);
    const auto nmpc = read_nmpc(cfg, opts, params, true);
    cfg.reject_unknown();

    const auto result = epinet::run_nmpc(params, nmpc);
    const std::filesystem::path out = opts.out_dir;
    write_trajectory(out / "trajectory.csv", result.trajectory, params);
    if (opts.plot) plot_outputs(out / "trajectory.svg", result.trajectory, "nmpc");

    std::vector<std::vector<std::string>> objective_rows;
    for (std::size_t k = 0; k < result.objective_history.size(); ++k)
        objective_rows.push_back({format_num(k * nmpc.dt),
                                  format_num(result.objective_history[k])});
    epinet::write_csv(out / "objective.csv", {"t", "J"}, objective_rows);

    json summary = {{"command", "nmpc"},
                    {"config", effective_config(params, nmpc, opts)},
                    {"final_I", result.final_I},
                    {"final_n", result.final_n},
                    {"controllable", result.controllable},
                    {"stalled", result.stalled}};
    write_summary(out, summary);
    return 0;
}

int cmd_experiment(const CommonOpts& opts, const std::string& name) {
    Config cfg = load_config(opts);
    const auto params = read_params(cfg);
    const auto nmpc = read_nmpc(cfg, opts, params, false);
    cfg.reject_unknown();
    epinet::scenario_run(name, opts.out_dir, params, nmpc, opts.plot, opts.threads);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise SIS epidemic on an adaptive network: simulation, "
                 "bifurcation analysis and receding-horizon link-rewiring control"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool fine = false;
    std::string scenario;

    auto* simulate = app.add_subcommand("simulate", "integrate the constant-control system");
    add_common(simulate, opts);
    simulate->add_flag("--fine", fine, "record outputs at substep resolution");

    auto* regions = app.add_subcommand("regions", "three-regime map on the (u1,u2) plane");
    add_common(regions, opts);

    auto* nmpc = app.add_subcommand("nmpc", "receding-horizon control run");
    add_common(nmpc, opts);

    auto* experiment = app.add_subcommand("experiment", "named reproduction study");
    add_common(experiment, opts);
    experiment->add_option("name", scenario, "scenario name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts, fine);
        if (regions->parsed()) return cmd_regions(opts);
        if (nmpc->parsed()) return cmd_nmpc(opts);
        if (experiment->parsed()) return cmd_experiment(opts, scenario);
    } catch (const epinet::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const epinet::UnknownScenario& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

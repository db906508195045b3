// wakesteer: command-line front end for the wake-steering toolkit.

#include <fmt/format.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <thread>

#include "wakesteer/calibration.hpp"
#include "wakesteer/controller.hpp"
#include "wakesteer/error.hpp"
#include "wakesteer/estimation.hpp"
#include "wakesteer/plant.hpp"
#include "wakesteer/report.hpp"
#include "wakesteer/scenario_io.hpp"
#include "wakesteer/yaw_optimizer.hpp"

extern char** environ;

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wakesteer;

namespace {

struct RunFlags {
    std::string manifest;
    std::string scenario;
    std::string params;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::string endpoint = "127.0.0.1:5555";
    std::string out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_endpoint) {
    cmd->add_option("--manifest", f.manifest, "Run manifest (JSON); other flags override its fields");
    cmd->add_option("--scenario", f.scenario, "Scenario file");
    cmd->add_option("--params", f.params, "Wake parameter file");
    cmd->add_option("--mode", f.mode, "greedy | openloop | closedloop_det | closedloop_robust");
    cmd->add_option("--seed", f.seed, "Seed for plant mismatch, noise and optimiser starts");
    cmd->add_option("--duration", f.duration, "Simulated time [s]");
    if (with_endpoint) cmd->add_option("--endpoint", f.endpoint, "host:port of the plant");
    cmd->add_option("--out", f.out, "Output directory");
}

RunManifest manifest_from(const RunFlags& f) {
    RunManifest m;
    if (!f.manifest.empty()) {
        m = RunManifest::load(f.manifest);
    } else {
        m.out = "run";
    }
    if (!f.scenario.empty()) m.scenario = f.scenario;
    if (!f.params.empty()) m.params = f.params;
    if (!f.mode.empty()) m.mode = parse_control_mode(f.mode);
    if (f.seed) m.seed = *f.seed;
    if (f.duration) m.duration = *f.duration;
    if (!f.out.empty()) m.out = f.out;
    if (m.scenario.empty() || m.params.empty()) {
        throw ConfigError("--scenario and --params (or a manifest providing them) are required");
    }
    m.validate();
    return m;
}

void echo_invocation(const fs::path& out, const std::string& command, int argc, char** argv) {
    fs::create_directories(out);
    ordered_json j;
    j["schema"] = "wakesteer.invocation/1";
    j["command"] = command;
    auto& args = j["args"] = ordered_json::array();
    for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
    write_text_file(out / (command + ".invocation.json"), j.dump(2) + "\n");
}

FarmScenario require_scenario(const std::string& path, ScenarioFile* file = nullptr) {
    if (path.empty()) throw ConfigError("--scenario is required");
    auto sf = load_scenario(path);
    if (file) *file = sf;
    return sf.farm;
}

WakeParams require_params(const std::string& path) {
    if (path.empty()) throw ConfigError("--params is required");
    return load_params(path);
}

// ---------------------------------------------------------------- wake-slice

struct SliceFlags {
    std::string scenario, params, out = "slices";
    std::vector<double> distances{3.0, 5.0, 7.0, 10.0};
    std::size_t source = 0;
    int ny = 41, nz = 21;
};

int cmd_wake_slice(const SliceFlags& f, int argc, char** argv) {
    const auto farm = require_scenario(f.scenario);
    const auto params = require_params(f.params);
    std::set<double> seen;
    for (double d : f.distances) {
        if (!seen.insert(d).second) throw ConfigError(fmt::format("distance {} given twice", d));
    }
    echo_invocation(f.out, "wake-slice", argc, argv);
    SliceGrid grid;
    grid.ny = f.ny;
    grid.nz = f.nz;
    for (double d : f.distances) {
        const double one[] = {d};
        const auto c = extract_slices(farm, params, one, grid, f.source, "slice");
        const auto path = fs::path(f.out) / fmt::format("slice_t{}_{:g}D.csv", f.source, d);
        std::ofstream os(path);
        if (!os) throw ConfigError("cannot write " + path.string());
        write_flow_csv(os, c.points, c.measured);
        std::cout << path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateFlags {
    std::string scenario, params, data, bounds, out = "calibration";
    bool synthesize = false;
    double noise = 0.05;
    std::vector<double> ti_levels{0.02, 0.06, 0.10, 0.14};
    std::vector<double> distances{3.0, 5.0, 7.0, 10.0};
    std::size_t budget = 5000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

std::string slices_to_json(const std::vector<CalibrationCase>& cases) {
    ordered_json j;
    j["schema"] = "wakesteer.slices/1";
    auto& arr = j["cases"] = ordered_json::array();
    for (const auto& c : cases) {
        ordered_json cj;
        cj["id"] = c.id;
        cj["ti"] = c.scenario.ambient.i_inf;
        cj["yaw_deg"] = rad2deg(c.scenario.controls.yaw.at(0));
        cj["thrust_scale"] = c.scenario.controls.thrust_scale.at(0);
        auto& pts = cj["points"] = ordered_json::array();
        for (const auto& p : c.points) pts.push_back({p.east, p.north, p.z});
        cj["u"] = c.measured;
        arr.push_back(std::move(cj));
    }
    return j.dump() + "\n";
}

std::vector<CalibrationCase> slices_from_json(const std::string& text, const FarmScenario& base) {
    std::vector<CalibrationCase> cases;
    try {
        const auto j = ordered_json::parse(text);
        if (j.value("schema", "") != "wakesteer.slices/1") throw ConfigError("slices schema must be wakesteer.slices/1");
        for (const auto& cj : j.at("cases")) {
            CalibrationCase c;
            c.id = cj.at("id").get<std::string>();
            c.scenario = base;
            c.scenario.ambient.i_inf = cj.at("ti").get<double>();
            c.scenario.controls.yaw = {deg2rad(cj.at("yaw_deg").get<double>())};
            c.scenario.controls.thrust_scale = {cj.at("thrust_scale").get<double>()};
            for (const auto& p : cj.at("points")) {
                c.points.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
            }
            c.measured = cj.at("u").get<std::vector<double>>();
            c.validate();
            cases.push_back(std::move(c));
        }
    } catch (const ordered_json::exception& e) {
        throw ConfigError(std::string("slices: ") + e.what());
    }
    return cases;
}

int cmd_calibrate(const CalibrateFlags& f, int argc, char** argv) {
    const auto farm = require_scenario(f.scenario);
    if (farm.size() != 1) throw ConfigError("calibration uses a single-turbine scenario");
    echo_invocation(f.out, "calibrate", argc, argv);
    std::vector<CalibrationCase> cases;
    if (f.synthesize) {
        const auto truth = require_params(f.params);
        cases = synthesize_calibration_set(farm, truth, f.ti_levels, f.distances, SliceGrid{}, f.noise, f.seed);
        write_text_file(fs::path(f.out) / "slices.json", slices_to_json(cases));
        std::cout << fmt::format("rmse at the generating parameters {:.5f} m/s\n", calibration_cost(truth, cases).cost);
    } else {
        if (f.data.empty()) throw ConfigError("calibrate needs --data or --synthesize");
        cases = slices_from_json(read_text_file(f.data), farm);
    }
    const auto bounds = f.bounds.empty() ? ParamBounds::reference() : load_bounds(f.bounds);
    CalibrationConfig cfg;
    cfg.max_evaluations = f.budget;
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    const auto res = calibrate(cases, bounds, cfg);

    write_text_file(fs::path(f.out) / "params_calibrated.json", params_to_json(res.psi));
    std::ofstream trace(fs::path(f.out) / "calibration_trace.csv");
    trace << "generation,best_cost\n";
    for (std::size_t g = 0; g < res.trace.size(); ++g) trace << fmt::format("{},{:.9g}\n", g, res.trace[g]);

    const auto& p = res.psi;
    std::cout << fmt::format(
        "rmse {:.5f} m/s after {} evaluations ({} generations)\n"
        "alpha {:.4g}  beta {:.4g}  k_a {:.4g}  k_b {:.4g}  a_d {:.4g}  b_d {:.4g}\n",
        res.cost, res.evaluations, res.generations, p.alpha, p.beta, p.k_a, p.k_b, p.a_d, p.b_d);
    return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateFlags {
    std::string scenario, params, measurements, out = "estimate";
    double noise = 0.0;
    std::uint64_t seed = 1;
};

int cmd_estimate(const EstimateFlags& f, int argc, char** argv) {
    ScenarioFile sf;
    const auto farm = require_scenario(f.scenario, &sf);
    const auto params = require_params(f.params);
    echo_invocation(f.out, "estimate", argc, argv);

    MeasurementWindow window;
    if (!f.measurements.empty()) {
        try {
            const auto j = ordered_json::parse(read_text_file(f.measurements));
            window.power_w = j.at("power_w").get<std::vector<double>>();
            window.direction = j.at("dir_rad").get<std::vector<double>>();
        } catch (const ordered_json::exception& e) {
            throw ConfigError(std::string("measurements: ") + e.what());
        }
    } else {
        // Model-generated window at the scenario's own ambient conditions.
        const auto ev = evaluate_farm(farm, params);
        std::mt19937_64 rng(f.seed);
        std::normal_distribution<double> normal;
        for (const auto& t : ev.turbines) window.power_w.push_back(t.power_w * (1.0 + f.noise * normal(rng)));
        window.direction.assign(farm.size(), farm.ambient.phi);
    }
    window.validate(farm.size());
    const auto weights = sf.estimator_weights.empty() ? std::vector<double>(farm.size(), 1.0) : sf.estimator_weights;
    const auto est = estimate_ambient(window, weights, EstimationBounds{}, farm, params);

    ordered_json j;
    j["schema"] = "wakesteer.estimate/1";
    j["phi_deg"] = rad2deg(est.xi.phi);
    j["ti"] = est.xi.i_inf;
    j["u_inf"] = est.xi.u_inf;
    j["sigma_phi_deg"] = rad2deg(est.sigma_phi);
    j["cost_w"] = est.cost;
    j["evaluations"] = est.evaluations;
    write_text_file(fs::path(f.out) / "estimate.json", j.dump(2) + "\n");
    std::cout << fmt::format("phi {:.3f} deg  TI {:.4f}  U {:.4f} m/s  (sigma_phi {:.2f} deg, cost {:.1f} W)\n",
                             rad2deg(est.xi.phi), est.xi.i_inf, est.xi.u_inf, rad2deg(est.sigma_phi), est.cost);
    return 0;
}

// ---------------------------------------------------------------- optimize

struct OptimizeFlags {
    std::string scenario, params, out = "optimize";
    double sigma_deg = 0.0;
    std::uint64_t seed = 1;
    int nodes = 5;
};

int cmd_optimize(const OptimizeFlags& f, int argc, char** argv) {
    ScenarioFile sf;
    auto farm = require_scenario(f.scenario, &sf);
    const auto params = require_params(f.params);
    echo_invocation(f.out, "optimize", argc, argv);
    YawOptions opts;
    opts.seed = f.seed;
    opts.quadrature_nodes = f.nodes;
    const auto bounds = YawBounds::uniform(farm.size(), sf.yaw_lower, sf.yaw_upper);
    const auto res = optimize_yaw(farm.ambient, deg2rad(f.sigma_deg), bounds, farm, params, opts);

    ordered_json j;
    j["schema"] = "wakesteer.optimum/1";
    std::vector<double> deg;
    for (double g : res.gamma) deg.push_back(rad2deg(g));
    j["gamma_deg"] = deg;
    j["thrust_scale"] = res.thrust_scale;
    j["objective_w"] = res.objective;
    j["greedy_objective_w"] = res.greedy_objective;
    j["gain_pct"] = 100.0 * (res.objective - res.greedy_objective) / res.greedy_objective;
    j["evaluations"] = res.evaluations;
    j["winning_start"] = res.winning_start;
    write_text_file(fs::path(f.out) / "optimum.json", j.dump(2) + "\n");

    farm.controls.yaw = res.gamma;
    farm.controls.thrust_scale = res.thrust_scale;
    std::ofstream os(fs::path(f.out) / "evaluation.csv");
    write_evaluation_csv(os, evaluate_farm(farm, params));

    std::cout << "gamma_deg";
    for (double d : deg) std::cout << fmt::format(" {:.1f}", d);
    std::cout << fmt::format("\nobjective {:.1f} W, greedy {:.1f} W, gain {:.2f}%\n", res.objective,
                             res.greedy_objective, j["gain_pct"].get<double>());
    return 0;
}

// ---------------------------------------------------------------- plant / controller

PlantConfig plant_config(const RunManifest& m, const FarmScenario& farm) {
    PlantConfig cfg;
    cfg.psi_plant = perturbed_params(load_params(m.params), m.seed, m.mismatch);
    cfg.xi_true = farm.ambient;
    cfg.dt = m.dt;
    cfg.power_noise = m.power_noise;
    cfg.direction_noise = deg2rad(m.direction_noise_deg);
    cfg.seed = m.seed;
    return cfg;
}

int cmd_plant(const RunFlags& f, int argc, char** argv) {
    const auto m = manifest_from(f);
    echo_invocation(m.out, "plant", argc, argv);
    auto farm = load_scenario(m.scenario).farm;
    farm.controls = ControlVector::greedy(farm.size());
    return run_plant_server(farm, plant_config(m, farm), transport::Endpoint::parse(f.endpoint), m.duration, m.out);
}

ControllerConfig controller_config(const RunManifest& m) {
    ControllerConfig cfg;
    cfg.mode = m.mode;
    cfg.control_period = m.control_period;
    cfg.averaging_window = m.averaging_window;
    cfg.scenario = load_scenario(m.scenario);
    cfg.params = load_params(m.params);
    cfg.yaw.seed = m.seed;
    return cfg;
}

int cmd_controller(const RunFlags& f, int argc, char** argv) {
    const auto m = manifest_from(f);
    echo_invocation(m.out, "controller", argc, argv);
    return run_controller_client(controller_config(m), transport::Endpoint::parse(f.endpoint), m.out);
}

// ---------------------------------------------------------------- cosim / compare

pid_t spawn(const fs::path& exe, const std::vector<std::string>& args) {
    std::vector<char*> argv;
    std::string exe_s = exe.string();
    argv.push_back(exe_s.data());
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawn(&pid, exe_s.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
        throw std::runtime_error("cannot start " + exe_s);
    }
    return pid;
}

int exit_code(int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

int run_cosim(RunManifest m, const fs::path& self) {
    fs::create_directories(m.out);
    m.out = fs::absolute(m.out);
    m.scenario = fs::absolute(m.scenario);
    m.params = fs::absolute(m.params);
    const auto echo = m.out / "manifest.json";
    write_text_file(echo, m.to_json());

    const auto endpoint = fmt::format("127.0.0.1:{}", transport::find_free_port());
    const std::vector<std::string> common{"--manifest", echo.string(), "--endpoint", endpoint};
    auto plant_args = common;
    plant_args.insert(plant_args.begin(), "plant");
    auto ctrl_args = common;
    ctrl_args.insert(ctrl_args.begin(), "controller");

    std::map<pid_t, std::string> children;
    children[spawn(self, plant_args)] = "plant";
    children[spawn(self, ctrl_args)] = "controller";
    int code = 0;
    while (!children.empty()) {
        int status = 0;
        const pid_t pid = waitpid(-1, &status, 0);
        if (pid < 0) {
            if (errno == EINTR) continue;
            break;
        }
        const auto it = children.find(pid);
        if (it == children.end()) continue;
        const int rc = exit_code(status);
        const auto name = it->second;
        children.erase(it);
        if (rc != 0) {
            std::cerr << fmt::format("cosim: {} exited with code {}\n", name, rc);
            for (const auto& [other, _] : children) kill(other, SIGTERM);
            code = 2;
        }
    }
    if (code != 0) return code;

    const auto scenario = load_scenario(m.scenario);
    RunSummary s;
    s.scenario = scenario.name;
    s.mode = m.mode;
    s.seed = m.seed;
    s.duration = m.duration;
    s.psi_plant = perturbed_params(load_params(m.params), m.seed, m.mismatch);
    s.windows = window_means(read_plant_log(m.out / "plant_log.csv"), summary_windows(m.duration));
    write_text_file(m.out / "summary.json", s.to_json());
    return 0;
}

int cmd_cosim(const RunFlags& f, const fs::path& self, int argc, char** argv) {
    const auto m = manifest_from(f);
    echo_invocation(m.out, "cosim", argc, argv);
    const int rc = run_cosim(m, self);
    if (rc == 0) {
        const auto s = RunSummary::load(m.out / "summary.json");
        for (const auto& w : s.windows) {
            std::cout << fmt::format("{:>6g}-{:<6g} {:>14.1f} W\n", w.start, w.end, w.mean_farm_power_w);
        }
    }
    return rc;
}

struct CompareFlags {
    RunFlags run;
    std::vector<std::string> runs;
};

int cmd_compare(const CompareFlags& f, const fs::path& self, int argc, char** argv) {
    fs::path out = f.run.out.empty() ? fs::path("compare") : fs::path(f.run.out);
    std::vector<fs::path> dirs;
    if (!f.runs.empty()) {
        for (const auto& r : f.runs) dirs.emplace_back(r);
    } else {
        auto base = manifest_from(f.run);
        std::vector<RunManifest> ms;
        for (auto mode : {ControlMode::Greedy, ControlMode::OpenLoop, ControlMode::ClosedLoopDeterministic,
                          ControlMode::ClosedLoopRobust}) {
            auto m = base;
            m.mode = mode;
            m.out = out / to_string(mode);
            ms.push_back(m);
            dirs.push_back(m.out);
        }
        std::vector<int> codes(ms.size(), 0);
        {
            std::vector<std::jthread> workers;
            for (std::size_t k = 0; k < ms.size(); ++k) {
                workers.emplace_back([&, k] { codes[k] = run_cosim(ms[k], self); });
            }
        }
        for (std::size_t k = 0; k < codes.size(); ++k) {
            if (codes[k] != 0) {
                std::cerr << "compare: run " << dirs[k] << " failed\n";
                return codes[k];
            }
        }
    }
    echo_invocation(out, "compare", argc, argv);
    std::vector<RunSummary> summaries;
    for (const auto& d : dirs) summaries.push_back(RunSummary::load(d / "summary.json"));
    const auto c = compare_runs(summaries);
    write_text_file(out / "comparison.csv", comparison_csv(c));
    write_text_file(out / "gains.csv", gains_csv(c));
    std::cout << gains_csv(c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop wake steering: surrogate model, calibration, estimation, optimisation and co-simulation"};
    app.require_subcommand(1);
    const fs::path self = fs::read_symlink("/proc/self/exe");

    SliceFlags slice;
    auto* c_slice = app.add_subcommand("wake-slice", "Cross-stream velocity slices behind a turbine");
    c_slice->add_option("--scenario", slice.scenario)->required();
    c_slice->add_option("--params", slice.params)->required();
    c_slice->add_option("--out", slice.out);
    c_slice->add_option("--distances", slice.distances, "Downstream distances [D]")->delimiter(',');
    c_slice->add_option("--source", slice.source, "Index of the wake-source turbine");
    c_slice->add_option("--ny", slice.ny);
    c_slice->add_option("--nz", slice.nz);

    CalibrateFlags cal;
    auto* c_cal = app.add_subcommand("calibrate", "Fit wake parameters to velocity slices");
    c_cal->add_option("--scenario", cal.scenario)->required();
    c_cal->add_option("--params", cal.params, "Truth parameters when synthesising data");
    c_cal->add_option("--data", cal.data, "Slice data (wakesteer.slices/1)");
    c_cal->add_flag("--synthesize", cal.synthesize, "Generate noisy slices from --params first");
    c_cal->add_option("--noise", cal.noise, "Noise on synthesised speeds [m/s]");
    c_cal->add_option("--ti-levels", cal.ti_levels)->delimiter(',');
    c_cal->add_option("--distances", cal.distances)->delimiter(',');
    c_cal->add_option("--bounds", cal.bounds);
    c_cal->add_option("--budget", cal.budget, "Cost evaluations");
    c_cal->add_option("--seed", cal.seed);
    c_cal->add_option("--threads", cal.threads);
    c_cal->add_option("--out", cal.out);

    EstimateFlags est;
    auto* c_est = app.add_subcommand("estimate", "Estimate ambient conditions from windowed turbine data");
    c_est->add_option("--scenario", est.scenario)->required();
    c_est->add_option("--params", est.params)->required();
    c_est->add_option("--measurements", est.measurements, "JSON with power_w and dir_rad arrays");
    c_est->add_option("--noise", est.noise, "Power noise when generating the window from the model");
    c_est->add_option("--seed", est.seed);
    c_est->add_option("--out", est.out);

    OptimizeFlags opt;
    auto* c_opt = app.add_subcommand("optimize", "Optimal yaw set-points for the scenario's ambient conditions");
    c_opt->add_option("--scenario", opt.scenario)->required();
    c_opt->add_option("--params", opt.params)->required();
    c_opt->add_option("--sigma-deg", opt.sigma_deg, "Wind-direction standard deviation");
    c_opt->add_option("--nodes", opt.nodes, "Quadrature nodes");
    c_opt->add_option("--seed", opt.seed);
    c_opt->add_option("--out", opt.out);

    RunFlags plant_f, ctrl_f, cosim_f;
    add_run_flags(app.add_subcommand("plant", "Serve the synthetic plant"), plant_f, true);
    add_run_flags(app.add_subcommand("controller", "Connect a controller to a plant"), ctrl_f, true);
    add_run_flags(app.add_subcommand("cosim", "Run plant and controller together"), cosim_f, false);

    CompareFlags cmp;
    auto* c_cmp = app.add_subcommand("compare", "Run or collect all four modes and tabulate gains");
    add_run_flags(c_cmp, cmp.run, false);
    c_cmp->add_option("--runs", cmp.runs, "Existing run directories to tabulate instead")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_slice) return cmd_wake_slice(slice, argc, argv);
        if (*c_cal) return cmd_calibrate(cal, argc, argv);
        if (*c_est) return cmd_estimate(est, argc, argv);
        if (*c_opt) return cmd_optimize(opt, argc, argv);
        if (app.got_subcommand("plant")) return cmd_plant(plant_f, argc, argv);
        if (app.got_subcommand("controller")) return cmd_controller(ctrl_f, argc, argv);
        if (app.got_subcommand("cosim")) return cmd_cosim(cosim_f, self, argc, argv);
        if (*c_cmp) return cmd_compare(cmp, self, argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include "wakesteer/calibration.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "wakesteer/error.hpp"
#include "wakesteer/nelder_mead.hpp"
#include "wakesteer/scenario_io.hpp"

namespace wakesteer {
namespace {

Box to_box(const ParamBounds& b) {
    const auto lo = b.lower.to_array();
    const auto hi = b.upper.to_array();
    return {{lo.begin(), lo.end()}, {hi.begin(), hi.end()}};
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = 0.5 * (a + b);
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

std::string fmt_case_id(double ti, double yaw_deg, double thrust_scale) {
    return fmt::format("ti{:.3f}_yaw{:+.0f}_ts{:.2f}", ti, yaw_deg, thrust_scale);
}

}  // namespace

ParamBounds ParamBounds::reference() {
    return {{0.580, 0.0385, 0.0959, 9.25e-4, -1.0, -4.0e-2}, {9.28, 0.616, 1.53, 1.48e-2, 1.0, -2.5e-3}};
}

bool ParamBounds::contains(const WakeParams& p) const {
    const auto v = p.to_array();
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo[i] || v[i] > hi[i]) return false;
    }
    return true;
}

WakeParams ParamBounds::clamp(const WakeParams& p) const {
    auto v = p.to_array();
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    return WakeParams::from_array(v);
}

void ParamBounds::validate() const {
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) {
            throw ConfigError("parameter bounds: lower must be below upper for every component");
        }
    }
}

void CalibrationCase::validate() const {
    if (points.empty() || points.size() != measured.size()) {
        throw ConfigError("calibration case " + id + ": point and measurement counts differ or are zero");
    }
    for (double u : measured) {
        if (!(u > 0.0)) {
            throw ConfigError("calibration case " + id + ": measured speeds must be positive");
        }
    }
}

CalibrationCase extract_slices(const FarmScenario& scenario, const WakeParams& params,
                               std::span<const double> distances, const SliceGrid& grid,
                               std::size_t source, std::string id) {
    if (source >= scenario.size()) {
        throw ConfigError("slice source turbine index out of range");
    }
    if (grid.ny < 1 || grid.nz < 1) {
        throw ConfigError("slice grid needs at least one point per direction");
    }
    const double d = scenario.turbine.diameter;
    const double hub = scenario.turbine.hub_height;
    const double phi = scenario.ambient.phi;
    const auto src = rotate_to_wind_frame(scenario.layout.positions[source], phi);
    const auto ys = linspace(-grid.half_width * d, grid.half_width * d, grid.ny);
    const auto zs = linspace(hub - grid.half_height * d, hub + grid.half_height * d, grid.nz);

    CalibrationCase out;
    out.id = std::move(id);
    out.scenario = scenario;
    for (double dist : distances) {
        if (!(dist > 0.0)) {
            throw ConfigError("slice distances must be positive");
        }
        const double x = src.x + dist * d;
        for (double yo : ys) {
            const double y = src.y + yo;
            // Inverse of the wind-frame rotation.
            const double east = x * std::cos(phi) - y * std::sin(phi);
            const double north = x * std::sin(phi) + y * std::cos(phi);
            for (double z : zs) {
                out.points.push_back({east, north, z});
            }
        }
    }
    out.measured = sample_flow(scenario, params, out.points);
    return out;
}

CostResult calibration_cost(const WakeParams& psi, std::span<const CalibrationCase> cases) {
    if (cases.empty()) {
        throw ConfigError("calibration cost needs at least one case");
    }
    CostResult res;
    double sum_sq = 0.0;
    std::size_t m = 0;
    try {
        psi.validate();
        for (const auto& c : cases) {
            const auto model = sample_flow(c.scenario, psi, c.points);
            for (std::size_t i = 0; i < model.size(); ++i) {
                const double r = c.measured[i] - model[i];
                sum_sq += r * r;
            }
            m += model.size();
        }
    } catch (const DomainError& e) {
        res.cost = std::numeric_limits<double>::infinity();
        res.feasible = false;
        res.diagnostic = e.what();
        return res;
    }
    res.cost = std::sqrt(sum_sq / static_cast<double>(m));
    return res;
}

CalibrationResult calibrate(std::span<const CalibrationCase> cases, const ParamBounds& bounds,
                            const CalibrationConfig& config) {
    bounds.validate();
    for (const auto& c : cases) c.validate();
    const Box box = to_box(bounds);
    const Objective objective = [&](std::span<const double> x) {
        return calibration_cost(WakeParams::from_array(x), cases).cost;
    };

    const unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t polish_budget =
        config.polish ? static_cast<std::size_t>(config.polish_share * static_cast<double>(config.max_evaluations)) : 0;

    DeOptions de;
    de.population_factor = config.population_factor;
    de.crossover = config.crossover;
    de.differential_weight = config.differential_weight;
    de.max_evaluations = config.max_evaluations - polish_budget;
    de.tolerance = config.tolerance;
    de.seed = config.seed;
    de.threads = threads;
    const auto global = differential_evolution(objective, box, de);

    CalibrationResult res;
    res.psi = WakeParams::from_array(global.best);
    res.cost = global.best_cost;
    res.generations = global.generations;
    res.evaluations = global.evaluations;
    res.converged = global.converged;
    res.trace = global.trace;

    const std::size_t remaining = config.max_evaluations - res.evaluations;
    if (config.polish && remaining > box.dim() + 1) {
        NelderMeadOptions nm;
        nm.max_evaluations = remaining;
        nm.initial_step = 0.01;
        nm.f_tolerance = config.tolerance;
        const auto local = nelder_mead(objective, box, global.best, nm);
        res.evaluations += local.evaluations;
        if (local.best_cost <= res.cost) {
            res.psi = WakeParams::from_array(local.best);
            res.cost = local.best_cost;
        }
        res.converged = res.converged || local.converged;
        res.trace.push_back(res.cost);
    }
    res.psi = bounds.clamp(res.psi);
    return res;
}

std::vector<CalibrationCase> synthesize_calibration_set(const FarmScenario& single_turbine,
                                                        const WakeParams& truth,
                                                        std::span<const double> ti_levels,
                                                        std::span<const double> distances,
                                                        const SliceGrid& grid, double noise_sigma,
                                                        std::uint64_t seed) {
    if (single_turbine.size() != 1) {
        throw ConfigError("calibration data are synthesised from a single-turbine scenario");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    struct Setting {
        double yaw_deg;
        double thrust_scale;
    };
    std::vector<Setting> settings;
    for (int yaw = -30; yaw <= 30; yaw += 10) settings.push_back({static_cast<double>(yaw), 1.0});
    for (double s : {0.95, 0.90, 0.85, 0.80}) settings.push_back({0.0, s});

    std::vector<CalibrationCase> cases;
    for (double ti : ti_levels) {
        for (const auto& st : settings) {
            auto sc = single_turbine;
            sc.ambient.i_inf = ti;
            sc.controls.yaw = {deg2rad(st.yaw_deg)};
            sc.controls.thrust_scale = {st.thrust_scale};
            auto c = extract_slices(sc, truth, distances, grid, 0,
                                    fmt_case_id(ti, st.yaw_deg, st.thrust_scale));
            for (auto& u : c.measured) u += noise_sigma * noise(rng);
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

}  // namespace wakesteer

#pragma once

// JSON documents (scenario, turbine, params, bounds) and CSV exports.
// Every document carries a "schema" field of the form "wakesteer.<kind>/1".

#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wakesteer/farm.hpp"

namespace wakesteer {

struct ParamBounds;

/// A scenario document: the farm itself plus controller-side settings that
/// travel with it.
struct ScenarioFile {
    std::string name;
    FarmScenario farm;
    std::vector<double> estimator_weights;            // empty = uniform
    double yaw_lower = -25.0 * std::numbers::pi / 180.0;
    double yaw_upper = 25.0 * std::numbers::pi / 180.0;
    std::optional<AmbientConditions> open_loop_ambient;
};

ScenarioFile load_scenario(const std::filesystem::path& path);
ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& base_dir);
TurbineSpec load_turbine(const std::filesystem::path& path);

WakeParams load_params(const std::filesystem::path& path);
WakeParams parse_params(const std::string& text);
std::string params_to_json(const WakeParams& p);

ParamBounds load_bounds(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Columns: turbine,u_rotor,i_rotor,ct,power_w
void write_evaluation_csv(std::ostream& os, const FarmEvaluation& ev);

/// Columns: east,north,z,u
void write_flow_csv(std::ostream& os, std::span<const WorldPoint> points, std::span<const double> speeds);

double deg2rad(double deg);
double rad2deg(double rad);

}  // namespace wakesteer

#pragma once

// Run manifests, per-window summaries of plant logs and the mode comparison.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wakesteer/controller.hpp"
#include "wakesteer/plant.hpp"

namespace wakesteer {

struct RunManifest {
    std::filesystem::path scenario;
    std::filesystem::path params;
    ControlMode mode = ControlMode::Greedy;
    std::uint64_t seed = 1;
    double duration = 2000.0;
    std::filesystem::path out;

    // Plant options.
    double dt = 1.0;
    double power_noise = 0.02;
    double direction_noise_deg = 6.0;
    double mismatch = 0.15;
    // Controller options.
    double control_period = 600.0;
    double averaging_window = 300.0;

    /// Paths are resolved against `base_dir` when relative.
    static RunManifest parse(const std::string& text, const std::filesystem::path& base_dir);
    static RunManifest load(const std::filesystem::path& path);
    /// Paths written as given.
    std::string to_json() const;
    /// Referenced files exist, duration is a positive multiple of dt.
    void validate() const;
};

struct PowerWindow {
    double start = 0.0;
    double end = 0.0;
    double mean_farm_power_w = 0.0;
    std::size_t samples = 0;
};

/// [start, end) intervals reported for a run of `duration` seconds: the
/// fixed control-cycle windows that fit plus the whole run.
std::vector<std::pair<double, double>> summary_windows(double duration);

struct FarmPowerSeries {
    std::vector<double> t;
    std::vector<double> farm_power_w;
};

FarmPowerSeries read_plant_log(const std::filesystem::path& path);
std::vector<PowerWindow> window_means(const FarmPowerSeries& series,
                                      const std::vector<std::pair<double, double>>& windows);

struct RunSummary {
    std::string scenario;
    ControlMode mode = ControlMode::Greedy;
    std::uint64_t seed = 0;
    double duration = 0.0;
    WakeParams psi_plant;
    std::vector<PowerWindow> windows;

    std::string to_json() const;
    static RunSummary parse(const std::string& text);
    static RunSummary load(const std::filesystem::path& path);
    /// Mean power of the window [start, end); throws if absent.
    double mean(double start, double end) const;
};

/// Power and percentage gain versus greedy per window, one column per mode.
struct Comparison {
    std::vector<ControlMode> modes;
    std::vector<std::pair<double, double>> windows;
    std::vector<std::vector<double>> power_w;   // [window][mode]
    std::vector<std::vector<double>> gain_pct;  // [window][mode]
};

/// Requires a greedy run and identical scenario, seed and windows across runs.
Comparison compare_runs(const std::vector<RunSummary>& runs);
std::string comparison_csv(const Comparison& c);
std::string gains_csv(const Comparison& c);

}  // namespace wakesteer

#pragma once

// Synthetic plant for closed-loop runs: the surrogate with perturbed
// parameters, frozen-advection delays between turbine pairs and noisy
// measurements, stepped at a fixed interval.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <random>
#include <vector>

#include "wakesteer/calibration.hpp"
#include "wakesteer/farm.hpp"
#include "wakesteer/transport.hpp"

namespace wakesteer {

struct AmbientChange {
    double t_start = 0.0;  // [s]
    AmbientConditions xi;
};

struct PlantConfig {
    WakeParams psi_plant;
    AmbientConditions xi_true;
    double dt = 1.0;                                   // [s]
    double power_noise = 0.02;                         // multiplicative, 1 sigma
    double direction_noise = 0.10471975511965977;      // additive [rad], 6 degrees
    std::vector<AmbientChange> schedule;               // piecewise constant, replaces xi_true from t_start on
    double yaw_rate_limit = 0.0;                       // [rad/s], 0 = instantaneous
    std::uint64_t seed = 1;

    void validate(const ParamBounds& bounds = ParamBounds::reference()) const;
};

/// Reference parameters with each component multiplied by a seeded factor in
/// [1 - spread, 1 + spread], clamped into `bounds`.
WakeParams perturbed_params(const WakeParams& reference, std::uint64_t seed, double spread = 0.15,
                            const ParamBounds& bounds = ParamBounds::reference());

struct MeasurementRecord {
    double t = 0.0;
    std::vector<double> power_w;
    std::vector<double> direction;  // [rad]
};

class Plant {
public:
    /// `farm` supplies turbine and layout; its ambient and controls are the
    /// initial state (ambient is replaced by config.xi_true).
    Plant(const FarmScenario& farm, PlantConfig config);

    double time() const { return t_; }
    double dt() const { return config_.dt; }
    std::size_t size() const { return farm_.size(); }
    const ControlVector& applied() const { return own_; }

    /// Measurement at the current time with the controls already in effect.
    MeasurementRecord measure();
    /// Issue `commands` at the current time, advance by dt and measure.
    MeasurementRecord step(const ControlVector& commands);
    /// Noise-free powers at the current time.
    std::vector<double> true_powers();

    /// Time after which a command issued by j at `t_issue` reaches i.
    double delay(std::size_t j, std::size_t i) const;

private:
    struct Pending {
        double effective = 0.0;
        double yaw = 0.0;
        double thrust = 1.0;
    };

    AmbientConditions ambient_at(double t) const;
    void issue(const ControlVector& commands);
    std::deque<Pending>& queue(std::size_t j, std::size_t i) { return queues_[j * farm_.size() + i]; }

    FarmScenario farm_;
    PlantConfig config_;
    double t_ = 0.0;
    ControlVector own_;
    std::vector<std::deque<Pending>> queues_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct PlantLogRow {
    double t = 0.0;
    std::size_t turbine = 0;
    double power_w = 0.0;
    double dir_rad = 0.0;
    double yaw_cmd_rad = 0.0;
};

/// Columns: t,turbine,power_w,dir_rad,yaw_cmd_rad
void write_plant_log(const std::filesystem::path& path, const std::vector<PlantLogRow>& rows);

struct PlantRunResult {
    std::size_t steps = 0;
    std::size_t frames_sent = 0;
    std::size_t frames_received = 0;
    bool clean_shutdown = false;
};

/// Serve `steps` measurement/control exchanges on an accepted connection,
/// then send stop. The log is flushed even when the exchange fails.
PlantRunResult run_plant(Plant& plant, transport::Connection& conn, std::size_t steps,
                         std::vector<PlantLogRow>& log);

/// Bind `endpoint`, accept one controller, run for `duration` seconds and
/// write plant_log.csv into `out_dir`. Returns a process exit code.
int run_plant_server(const FarmScenario& farm, const PlantConfig& config,
                     const transport::Endpoint& endpoint, double duration,
                     const std::filesystem::path& out_dir);

}  // namespace wakesteer

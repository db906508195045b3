#pragma once

// Controller side of the co-simulation: rolling measurement window, periodic
// estimate-then-optimise updates and a zero-order hold in between.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wakesteer/estimation.hpp"
#include "wakesteer/protocol.hpp"
#include "wakesteer/scenario_io.hpp"
#include "wakesteer/transport.hpp"
#include "wakesteer/yaw_optimizer.hpp"

namespace wakesteer {

enum class ControlMode { Greedy, OpenLoop, ClosedLoopDeterministic, ClosedLoopRobust };

const char* to_string(ControlMode m);
/// Accepts greedy, openloop, closedloop_det, closedloop_robust.
ControlMode parse_control_mode(const std::string& s);

struct ControllerConfig {
    ControlMode mode = ControlMode::Greedy;
    double control_period = 600.0;    // [s]
    double averaging_window = 300.0;  // [s]
    ScenarioFile scenario;            // layout, turbine, weights, yaw bounds, open-loop ambient
    WakeParams params;                // controller's model
    EstimationBounds estimation_bounds;
    EstimationOptions estimation;
    YawOptions yaw;
};

struct ControllerLogRow {
    double t = 0.0;
    ControlMode mode = ControlMode::Greedy;
    std::optional<AmbientConditions> xi_est;
    std::vector<double> gamma;        // [rad]
    double objective_w = 0.0;         // NaN when no optimisation ran
    std::string note;
};

class Controller {
public:
    explicit Controller(ControllerConfig config);

    protocol::ControlMsg on_measurement(const protocol::MeasurementMsg& msg);
    const ControlVector& command() const { return command_; }
    const std::vector<ControllerLogRow>& log() const { return log_; }

private:
    void update(double t);

    ControllerConfig config_;
    YawBounds bounds_;
    std::vector<double> weights_;
    MeasurementHistory history_;
    ControlVector command_;
    std::optional<YawResult> open_loop_;
    double next_update_;
    std::vector<ControllerLogRow> log_;
};

/// Columns: t,mode,phi_deg,ti,u_inf,gamma_deg_0..gamma_deg_{n-1},objective_w,note
void write_controller_log(const std::filesystem::path& path, const std::vector<ControllerLogRow>& rows,
                          std::size_t n_turbines);

struct ControllerRunResult {
    std::size_t measurements = 0;
    std::size_t controls = 0;
    bool stopped = false;
};

/// Reply to every measurement until the plant sends stop.
ControllerRunResult run_controller(Controller& controller, transport::Connection& conn);

/// Connect to the plant at `endpoint`, run to completion and write
/// controller_log.csv into `out_dir`. Returns a process exit code.
int run_controller_client(const ControllerConfig& config, const transport::Endpoint& endpoint,
                          const std::filesystem::path& out_dir);

}  // namespace wakesteer

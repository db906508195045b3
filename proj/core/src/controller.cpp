#include "wakesteer/controller.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "wakesteer/error.hpp"

namespace wakesteer {

const char* to_string(ControlMode m) {
    switch (m) {
        case ControlMode::Greedy: return "greedy";
        case ControlMode::OpenLoop: return "openloop";
        case ControlMode::ClosedLoopDeterministic: return "closedloop_det";
        case ControlMode::ClosedLoopRobust: return "closedloop_robust";
    }
    return "unknown";
}

ControlMode parse_control_mode(const std::string& s) {
    for (auto m : {ControlMode::Greedy, ControlMode::OpenLoop, ControlMode::ClosedLoopDeterministic,
                   ControlMode::ClosedLoopRobust}) {
        if (s == to_string(m)) return m;
    }
    throw ConfigError("unknown mode '" + s + "' (greedy, openloop, closedloop_det, closedloop_robust)");
}

Controller::Controller(ControllerConfig config) : config_(std::move(config)) {
    if (!(config_.control_period > 0.0) || !(config_.averaging_window > 0.0)) {
        throw ConfigError("control period and averaging window must be positive");
    }
    const auto& farm = config_.scenario.farm;
    const std::size_t n = farm.size();
    bounds_ = YawBounds::uniform(n, config_.scenario.yaw_lower, config_.scenario.yaw_upper);
    bounds_.validate(n);
    weights_ = config_.scenario.estimator_weights;
    if (weights_.empty()) weights_.assign(n, 1.0);
    if (weights_.size() != n) throw ConfigError("estimator weights need one entry per turbine");
    command_ = ControlVector::greedy(n);
    next_update_ = config_.control_period;

    if (config_.mode == ControlMode::OpenLoop) {
        if (!config_.scenario.open_loop_ambient) {
            throw ConfigError("open-loop mode needs open_loop_ambient in the scenario");
        }
        open_loop_ = optimize_yaw(*config_.scenario.open_loop_ambient, 0.0, bounds_, farm, config_.params,
                                  config_.yaw);
    }
    log_.push_back({0.0, config_.mode, std::nullopt, command_.yaw, std::numeric_limits<double>::quiet_NaN(),
                    "initial"});
}

void Controller::update(double t) {
    ControllerLogRow row;
    row.t = t;
    row.mode = config_.mode;
    row.objective_w = std::numeric_limits<double>::quiet_NaN();
    const auto& farm = config_.scenario.farm;

    switch (config_.mode) {
        case ControlMode::Greedy:
            command_ = ControlVector::greedy(farm.size());
            break;
        case ControlMode::OpenLoop:
            command_.yaw = open_loop_->gamma;
            command_.thrust_scale = open_loop_->thrust_scale;
            row.xi_est = *config_.scenario.open_loop_ambient;
            row.objective_w = open_loop_->objective;
            break;
        case ControlMode::ClosedLoopDeterministic:
        case ControlMode::ClosedLoopRobust: {
            try {
                const auto window = history_.window(t, config_.averaging_window);
                FarmScenario active = farm;
                active.controls = command_;
                const auto est = estimate_ambient(window, weights_, config_.estimation_bounds, active,
                                                  config_.params, config_.estimation);
                const double sigma = config_.mode == ControlMode::ClosedLoopRobust ? est.sigma_phi : 0.0;
                auto opts = config_.yaw;
                opts.seed = config_.yaw.seed + static_cast<std::uint64_t>(std::llround(t));
                const auto res = optimize_yaw(est.xi, sigma, bounds_, farm, config_.params, opts);
                command_.yaw = res.gamma;
                command_.thrust_scale = res.thrust_scale;
                row.xi_est = est.xi;
                row.objective_w = res.objective;
            } catch (const EstimationError& e) {
                row.note = std::string("estimation failed, holding: ") + e.what();
            } catch (const DomainError& e) {
                row.note = std::string("model rejected estimate, holding: ") + e.what();
            }
            break;
        }
    }
    // Bounds are enforced here whatever the optimiser or estimator returned.
    for (std::size_t i = 0; i < command_.size(); ++i) {
        command_.yaw[i] = std::clamp(command_.yaw[i], bounds_.lower[i], bounds_.upper[i]);
    }
    row.gamma = command_.yaw;
    log_.push_back(std::move(row));
}

protocol::ControlMsg Controller::on_measurement(const protocol::MeasurementMsg& msg) {
    const std::size_t n = config_.scenario.farm.size();
    if (msg.turbines.size() != n) {
        throw protocol::ProtocolError(protocol::ErrorKind::Schema,
                                      fmt::format("measurement has {} turbines, expected {}", msg.turbines.size(), n));
    }
    std::vector<double> p(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = msg.turbines[i].power_w;
        d[i] = msg.turbines[i].dir_rad;
    }
    history_.add(msg.t, std::move(p), std::move(d));
    history_.prune(msg.t - config_.averaging_window - config_.control_period);

    // Small tolerance absorbs accumulated floating-point time steps.
    if (msg.t + 1e-9 >= next_update_) {
        update(msg.t);
        while (next_update_ <= msg.t + 1e-9) next_update_ += config_.control_period;
    }
    protocol::ControlMsg out;
    out.t = msg.t;
    for (std::size_t i = 0; i < n; ++i) out.turbines.push_back({command_.yaw[i], command_.thrust_scale[i]});
    return out;
}

void write_controller_log(const std::filesystem::path& path, const std::vector<ControllerLogRow>& rows,
                          std::size_t n_turbines) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "t,mode,phi_deg,ti,u_inf";
    for (std::size_t i = 0; i < n_turbines; ++i) os << ",gamma_deg_" << i;
    os << ",objective_w,note\n";
    for (const auto& r : rows) {
        os << fmt::format("{},{}", r.t, to_string(r.mode));
        if (r.xi_est) {
            os << fmt::format(",{:.4f},{:.6f},{:.6f}", rad2deg(r.xi_est->phi), r.xi_est->i_inf, r.xi_est->u_inf);
        } else {
            os << ",,,";
        }
        for (double g : r.gamma) os << fmt::format(",{:.3f}", rad2deg(g));
        if (std::isnan(r.objective_w)) {
            os << ",";
        } else {
            os << fmt::format(",{:.3f}", r.objective_w);
        }
        std::string note = r.note;
        for (auto& c : note) {
            if (c == ',' || c == '\n') c = ';';
        }
        os << "," << note << "\n";
    }
}

ControllerRunResult run_controller(Controller& controller, transport::Connection& conn) {
    ControllerRunResult res;
    for (;;) {
        auto msg = conn.recv_frame();
        if (std::holds_alternative<protocol::StopMsg>(msg)) {
            res.stopped = true;
            break;
        }
        if (const auto* err = std::get_if<protocol::ErrorMsg>(&msg)) {
            throw protocol::ProtocolError(protocol::ErrorKind::Schema, "plant reported: " + err->message);
        }
        const auto* m = std::get_if<protocol::MeasurementMsg>(&msg);
        if (m == nullptr) {
            throw protocol::ProtocolError(protocol::ErrorKind::Schema, "expected a measure frame");
        }
        ++res.measurements;
        conn.send_frame(controller.on_measurement(*m));
        ++res.controls;
    }
    if (res.measurements != res.controls) {
        throw protocol::ProtocolError(protocol::ErrorKind::Schema, "lock-step frame counts differ");
    }
    return res;
}

int run_controller_client(const ControllerConfig& config, const transport::Endpoint& endpoint,
                          const std::filesystem::path& out_dir) {
    Controller controller(config);
    int code = 0;
    try {
        auto conn = transport::connect(endpoint);
        const auto res = run_controller(controller, conn);
        if (!res.stopped) code = 2;
    } catch (const protocol::ProtocolError& e) {
        std::cerr << "controller: " << e.what() << "\n";
        code = 2;
    }
    std::filesystem::create_directories(out_dir);
    write_controller_log(out_dir / "controller_log.csv", controller.log(), config.scenario.farm.size());
    return code;
}

}  // namespace wakesteer

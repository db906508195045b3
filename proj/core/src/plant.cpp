#include "wakesteer/plant.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "wakesteer/error.hpp"

namespace wakesteer {

void PlantConfig::validate(const ParamBounds& bounds) const {
    if (!(dt > 0.0)) throw ConfigError("plant dt must be positive");
    if (!(power_noise >= 0.0) || !(direction_noise >= 0.0)) {
        throw ConfigError("plant noise levels must be non-negative");
    }
    if (!(yaw_rate_limit >= 0.0)) throw ConfigError("yaw rate limit must be non-negative");
    if (!bounds.contains(psi_plant)) throw ConfigError("plant parameters lie outside the parameter bounds");
    xi_true.validate();
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& c : schedule) {
        if (!(c.t_start > last)) throw ConfigError("ambient schedule must be strictly increasing in time");
        c.xi.validate();
        last = c.t_start;
    }
}

WakeParams perturbed_params(const WakeParams& reference, std::uint64_t seed, double spread,
                            const ParamBounds& bounds) {
    std::seed_seq seq{seed, std::uint64_t{0x706c616e74}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> factor(1.0 - spread, 1.0 + spread);
    auto v = reference.to_array();
    for (auto& x : v) x *= factor(rng);
    return bounds.clamp(WakeParams::from_array(v));
}

Plant::Plant(const FarmScenario& farm, PlantConfig config) : farm_(farm), config_(std::move(config)) {
    config_.validate();
    farm_.ambient = config_.xi_true;
    farm_.validate();
    own_ = farm_.controls;
    const std::size_t n = farm_.size();
    queues_.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            queue(j, i).push_back({-std::numeric_limits<double>::infinity(), own_.yaw[j], own_.thrust_scale[j]});
        }
    }
    std::seed_seq seq{config_.seed, std::uint64_t{0x6e6f697365}};
    rng_.seed(seq);
}

AmbientConditions Plant::ambient_at(double t) const {
    AmbientConditions xi = config_.xi_true;
    for (const auto& c : config_.schedule) {
        if (c.t_start <= t) xi = c.xi;
    }
    return xi;
}

double Plant::delay(std::size_t j, std::size_t i) const {
    const auto& a = farm_.layout.positions[j];
    const auto& b = farm_.layout.positions[i];
    return std::hypot(a.east - b.east, a.north - b.north) / ambient_at(t_).u_inf;
}

void Plant::issue(const ControlVector& commands) {
    const std::size_t n = farm_.size();
    if (commands.size() != n || commands.thrust_scale.size() != n) {
        throw DomainError(fmt::format("control vector has {} entries, the plant has {} turbines",
                                      commands.size(), n));
    }
    commands.validate(n);
    ControlVector next = commands;
    if (config_.yaw_rate_limit > 0.0) {
        const double max_step = config_.yaw_rate_limit * config_.dt;
        for (std::size_t j = 0; j < n; ++j) {
            next.yaw[j] = own_.yaw[j] + std::clamp(commands.yaw[j] - own_.yaw[j], -max_step, max_step);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (next.yaw[j] == own_.yaw[j] && next.thrust_scale[j] == own_.thrust_scale[j]) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            queue(j, i).push_back({t_ + delay(j, i), next.yaw[j], next.thrust_scale[j]});
        }
    }
    own_ = std::move(next);
}

std::vector<double> Plant::true_powers() {
    const std::size_t n = farm_.size();
    FarmScenario sc = farm_;
    sc.ambient = ambient_at(t_);

    // Controls seen by each turbine; turbines sharing a view share one evaluation.
    std::vector<ControlVector> views(n);
    for (std::size_t i = 0; i < n; ++i) {
        views[i] = own_;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            auto& q = queue(j, i);
            while (q.size() > 1 && q[1].effective <= t_) q.pop_front();
            views[i].yaw[j] = q.front().yaw;
            views[i].thrust_scale[j] = q.front().thrust;
        }
    }
    std::vector<double> out(n);
    std::vector<std::pair<std::size_t, FarmEvaluation>> done;
    for (std::size_t i = 0; i < n; ++i) {
        const FarmEvaluation* ev = nullptr;
        for (const auto& [k, e] : done) {
            if (views[k] == views[i]) {
                ev = &e;
                break;
            }
        }
        if (ev == nullptr) {
            sc.controls = views[i];
            done.emplace_back(i, evaluate_farm(sc, config_.psi_plant));
            ev = &done.back().second;
        }
        out[i] = ev->turbines[i].power_w;
    }
    return out;
}

MeasurementRecord Plant::measure() {
    MeasurementRecord m;
    m.t = t_;
    m.power_w = true_powers();
    const double phi = ambient_at(t_).phi;
    m.direction.resize(m.power_w.size());
    for (std::size_t i = 0; i < m.power_w.size(); ++i) {
        m.power_w[i] *= 1.0 + config_.power_noise * normal_(rng_);
        m.direction[i] = normalize_angle(phi + config_.direction_noise * normal_(rng_));
    }
    return m;
}

MeasurementRecord Plant::step(const ControlVector& commands) {
    issue(commands);
    t_ += config_.dt;
    return measure();
}

void write_plant_log(const std::filesystem::path& path, const std::vector<PlantLogRow>& rows) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "t,turbine,power_w,dir_rad,yaw_cmd_rad\n";
    for (const auto& r : rows) {
        os << fmt::format("{},{},{:.6f},{:.9f},{:.9f}\n", r.t, r.turbine, r.power_w, r.dir_rad, r.yaw_cmd_rad);
    }
}

PlantRunResult run_plant(Plant& plant, transport::Connection& conn, std::size_t steps,
                         std::vector<PlantLogRow>& log) {
    PlantRunResult res;
    auto m = plant.measure();
    for (std::size_t s = 0; s < steps; ++s) {
        protocol::MeasurementMsg msg;
        msg.t = m.t;
        msg.dt = plant.dt();
        for (std::size_t i = 0; i < m.power_w.size(); ++i) msg.turbines.push_back({m.power_w[i], m.direction[i]});
        conn.send_frame(msg);
        ++res.frames_sent;

        auto reply = conn.recv_frame();
        ++res.frames_received;
        if (std::holds_alternative<protocol::StopMsg>(reply)) {
            return res;
        }
        if (const auto* err = std::get_if<protocol::ErrorMsg>(&reply)) {
            throw protocol::ProtocolError(protocol::ErrorKind::Schema, "controller reported: " + err->message);
        }
        const auto* ctrl = std::get_if<protocol::ControlMsg>(&reply);
        if (ctrl == nullptr) {
            throw protocol::ProtocolError(protocol::ErrorKind::Schema, "expected a control frame");
        }
        ControlVector cmd;
        for (const auto& t : ctrl->turbines) {
            cmd.yaw.push_back(t.yaw_rad);
            cmd.thrust_scale.push_back(t.thrust_scale);
        }
        if (cmd.size() != plant.size()) {
            throw protocol::ProtocolError(protocol::ErrorKind::Schema,
                                          fmt::format("control frame has {} turbines, expected {}",
                                                      cmd.size(), plant.size()));
        }
        for (std::size_t i = 0; i < m.power_w.size(); ++i) {
            log.push_back({m.t, i, m.power_w[i], m.direction[i], cmd.yaw[i]});
        }
        ++res.steps;
        m = plant.step(cmd);
    }
    conn.send_frame(protocol::StopMsg{"duration reached"});
    ++res.frames_sent;
    res.clean_shutdown = true;
    return res;
}

int run_plant_server(const FarmScenario& farm, const PlantConfig& config,
                     const transport::Endpoint& endpoint, double duration,
                     const std::filesystem::path& out_dir) {
    const double ratio = duration / config.dt;
    if (!(duration > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw ConfigError("duration must be a positive multiple of the plant time step");
    }
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    Plant plant(farm, config);
    transport::Listener listener(endpoint);
    auto conn = listener.accept();

    std::vector<PlantLogRow> log;
    log.reserve(steps * farm.size());
    int code = 0;
    try {
        const auto res = run_plant(plant, conn, steps, log);
        if (!res.clean_shutdown) {
            std::cerr << "plant: controller stopped the run early at t=" << plant.time() << "\n";
        }
    } catch (const protocol::ProtocolError& e) {
        std::cerr << "plant: " << e.what() << "\n";
        if (e.kind() != protocol::ErrorKind::ConnectionClosed && e.kind() != protocol::ErrorKind::Io) {
            try {
                conn.send_frame(protocol::ErrorMsg{e.what()});
            } catch (const std::exception&) {
            }
        }
        code = 2;
    } catch (const DomainError& e) {
        std::cerr << "plant: " << e.what() << "\n";
        try {
            conn.send_frame(protocol::ErrorMsg{e.what()});
        } catch (const std::exception&) {
        }
        code = 2;
    }
    std::filesystem::create_directories(out_dir);
    write_plant_log(out_dir / "plant_log.csv", log);
    return code;
}

}  // namespace wakesteer

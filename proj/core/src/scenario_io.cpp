#include "wakesteer/scenario_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "wakesteer/calibration.hpp"
#include "wakesteer/error.hpp"

namespace wakesteer {
namespace {

using nlohmann::json;

void check_schema(const json& doc, const std::string& kind) {
    const std::string want = "wakesteer." + kind + "/1";
    if (!doc.is_object()) {
        throw ConfigError(kind + " document must be a JSON object");
    }
    if (!doc.contains("schema") || doc.at("schema") != want) {
        throw ConfigError(kind + " document must declare \"schema\": \"" + want + "\"");
    }
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

TurbineSpec turbine_from_json(const json& j) {
    TurbineSpec t;
    t.name = j.value("name", "turbine");
    t.diameter = j.at("diameter").get<double>();
    t.hub_height = j.at("hub_height").get<double>();
    t.air_density = j.value("air_density", 1.225);
    t.yaw_power_exponent = j.value("yaw_power_exponent", 1.88);
    std::vector<PerformanceRow> rows;
    for (const auto& r : j.at("performance")) {
        rows.push_back({r.at("u").get<double>(), r.at("ct").get<double>(), r.at("cp").get<double>()});
    }
    t.performance = PerformanceTable(std::move(rows));
    t.validate();
    return t;
}

AmbientConditions ambient_from_json(const json& j) {
    AmbientConditions a;
    a.phi = normalize_angle(deg2rad(j.at("phi_deg").get<double>()));
    a.i_inf = j.at("ti").get<double>();
    a.u_inf = j.at("u_inf").get<double>();
    a.validate();
    return a;
}

WakeParams params_from_json(const json& j) {
    WakeParams p;
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.k_a = j.at("k_a").get<double>();
    p.k_b = j.at("k_b").get<double>();
    p.a_d = j.at("a_d").get<double>();
    p.b_d = j.at("b_d").get<double>();
    return p;
}

}  // namespace

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

TurbineSpec load_turbine(const std::filesystem::path& path) {
    const auto doc = parse_json(read_text_file(path), path.string());
    check_schema(doc, "turbine");
    try {
        return turbine_from_json(doc);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    const auto doc = parse_json(text, "scenario");
    check_schema(doc, "scenario");
    ScenarioFile sf;
    try {
        sf.name = doc.value("name", "scenario");
        const auto& tj = doc.at("turbine");
        if (tj.contains("file")) {
            sf.farm.turbine = load_turbine(base_dir / tj.at("file").get<std::string>());
        } else {
            sf.farm.turbine = turbine_from_json(tj);
        }
        for (const auto& p : doc.at("layout")) {
            sf.farm.layout.positions.push_back({p.at("east").get<double>(), p.at("north").get<double>()});
        }
        const std::size_t n = sf.farm.layout.size();
        sf.farm.ambient = ambient_from_json(doc.at("ambient"));
        sf.farm.controls = ControlVector::greedy(n);
        if (doc.contains("controls")) {
            const auto& c = doc.at("controls");
            if (c.contains("yaw_deg")) {
                sf.farm.controls.yaw.clear();
                for (double d : c.at("yaw_deg").get<std::vector<double>>()) {
                    sf.farm.controls.yaw.push_back(deg2rad(d));
                }
            }
            if (c.contains("thrust_scale")) {
                sf.farm.controls.thrust_scale = c.at("thrust_scale").get<std::vector<double>>();
            }
        }
        sf.farm.shear_exponent = doc.value("shear_exponent", 0.0);
        if (doc.contains("estimator_weights")) {
            sf.estimator_weights = doc.at("estimator_weights").get<std::vector<double>>();
            if (sf.estimator_weights.size() != n) {
                throw ConfigError("estimator_weights must have one entry per turbine");
            }
        }
        if (doc.contains("yaw_bounds_deg")) {
            const auto b = doc.at("yaw_bounds_deg").get<std::vector<double>>();
            if (b.size() != 2 || !(b[0] <= 0.0 && 0.0 <= b[1])) {
                throw ConfigError("yaw_bounds_deg must be [lower<=0, upper>=0]");
            }
            sf.yaw_lower = deg2rad(b[0]);
            sf.yaw_upper = deg2rad(b[1]);
        }
        if (doc.contains("open_loop_ambient")) {
            sf.open_loop_ambient = ambient_from_json(doc.at("open_loop_ambient"));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    try {
        sf.farm.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return sf;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_text_file(path), path.parent_path());
}

WakeParams parse_params(const std::string& text) {
    const auto doc = parse_json(text, "params");
    check_schema(doc, "params");
    try {
        auto p = params_from_json(doc);
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
}

WakeParams load_params(const std::filesystem::path& path) {
    return parse_params(read_text_file(path));
}

std::string params_to_json(const WakeParams& p) {
    json j = {{"schema", "wakesteer.params/1"}, {"alpha", p.alpha}, {"beta", p.beta}, {"k_a", p.k_a},
              {"k_b", p.k_b}, {"a_d", p.a_d}, {"b_d", p.b_d}};
    return j.dump(2) + "\n";
}

ParamBounds load_bounds(const std::filesystem::path& path) {
    const auto doc = parse_json(read_text_file(path), path.string());
    check_schema(doc, "bounds");
    ParamBounds b;
    try {
        b.lower = params_from_json(doc.at("lower"));
        b.upper = params_from_json(doc.at("upper"));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    b.validate();
    return b;
}

void write_evaluation_csv(std::ostream& os, const FarmEvaluation& ev) {
    os << "turbine,u_rotor,i_rotor,ct,power_w\n";
    for (std::size_t i = 0; i < ev.turbines.size(); ++i) {
        const auto& t = ev.turbines[i];
        os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, t.u_rotor, t.i_rotor, t.c_t, t.power_w);
    }
}

void write_flow_csv(std::ostream& os, std::span<const WorldPoint> points, std::span<const double> speeds) {
    os << "east,north,z,u\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", points[i].east, points[i].north, points[i].z,
                          speeds[i]);
    }
}

}  // namespace wakesteer

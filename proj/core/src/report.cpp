#include "wakesteer/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "wakesteer/error.hpp"
#include "wakesteer/scenario_io.hpp"

namespace wakesteer {
namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kManifestSchema = "wakesteer.manifest/1";
constexpr const char* kSummarySchema = "wakesteer.summary/1";

template <class T>
void maybe(const ojson& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

RunManifest RunManifest::parse(const std::string& text, const std::filesystem::path& base_dir) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (j.value("schema", "") != kManifestSchema) {
        throw ConfigError(std::string("manifest schema must be ") + kManifestSchema);
    }
    RunManifest m;
    try {
        m.scenario = resolve(base_dir, j.at("scenario").get<std::string>());
        m.params = resolve(base_dir, j.at("params").get<std::string>());
        m.mode = parse_control_mode(j.at("mode").get<std::string>());
        maybe(j, "seed", m.seed);
        maybe(j, "duration", m.duration);
        m.out = resolve(base_dir, j.value("out", std::string("run")));
        if (j.contains("plant")) {
            const auto& p = j.at("plant");
            maybe(p, "dt", m.dt);
            maybe(p, "power_noise", m.power_noise);
            maybe(p, "direction_noise_deg", m.direction_noise_deg);
            maybe(p, "mismatch", m.mismatch);
        }
        if (j.contains("controller")) {
            const auto& c = j.at("controller");
            maybe(c, "control_period", m.control_period);
            maybe(c, "averaging_window", m.averaging_window);
        }
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    return parse(read_text_file(path), path.parent_path());
}

std::string RunManifest::to_json() const {
    ojson j;
    j["schema"] = kManifestSchema;
    j["scenario"] = scenario.string();
    j["params"] = params.string();
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["duration"] = duration;
    j["out"] = out.string();
    j["plant"] = {{"dt", dt},
                  {"power_noise", power_noise},
                  {"direction_noise_deg", direction_noise_deg},
                  {"mismatch", mismatch}};
    j["controller"] = {{"control_period", control_period}, {"averaging_window", averaging_window}};
    return j.dump(2) + "\n";
}

void RunManifest::validate() const {
    for (const auto& p : {scenario, params}) {
        if (!std::filesystem::exists(p)) throw ConfigError("manifest references a missing file: " + p.string());
    }
    if (!(dt > 0.0)) throw ConfigError("manifest: dt must be positive");
    const double ratio = duration / dt;
    if (!(duration > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw ConfigError("manifest: duration must be a positive multiple of dt");
    }
    if (!(mismatch >= 0.0 && mismatch < 1.0)) throw ConfigError("manifest: mismatch must lie in [0,1)");
}

std::vector<std::pair<double, double>> summary_windows(double duration) {
    static constexpr std::pair<double, double> kCycle[] = {
        {0, 600}, {600, 900}, {900, 1200}, {1200, 1500}, {1500, 1800}};
    std::vector<std::pair<double, double>> out;
    for (const auto& w : kCycle) {
        if (w.second <= duration) out.push_back(w);
    }
    out.emplace_back(0.0, duration);
    return out;
}

FarmPowerSeries read_plant_log(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path.string());
    std::string line;
    std::getline(is, line);
    if (line.rfind("t,turbine,power_w", 0) != 0) throw ConfigError(path.string() + " is not a plant log");
    FarmPowerSeries s;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string t, turbine, power;
        std::getline(ls, t, ',');
        std::getline(ls, turbine, ',');
        std::getline(ls, power, ',');
        const double tv = std::stod(t);
        const double pv = std::stod(power);
        if (s.t.empty() || s.t.back() != tv) {
            s.t.push_back(tv);
            s.farm_power_w.push_back(0.0);
        }
        s.farm_power_w.back() += pv;
    }
    return s;
}

std::vector<PowerWindow> window_means(const FarmPowerSeries& series,
                                      const std::vector<std::pair<double, double>>& windows) {
    std::vector<PowerWindow> out;
    for (const auto& [a, b] : windows) {
        PowerWindow w{a, b, 0.0, 0};
        for (std::size_t k = 0; k < series.t.size(); ++k) {
            if (series.t[k] >= a && series.t[k] < b) {
                w.mean_farm_power_w += series.farm_power_w[k];
                ++w.samples;
            }
        }
        if (w.samples > 0) w.mean_farm_power_w /= static_cast<double>(w.samples);
        out.push_back(w);
    }
    return out;
}

std::string RunSummary::to_json() const {
    ojson j;
    j["schema"] = kSummarySchema;
    j["scenario"] = scenario;
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["duration"] = duration;
    j["psi_plant"] = ojson::parse(params_to_json(psi_plant));
    auto& ws = j["windows"] = ojson::array();
    for (const auto& w : windows) {
        ws.push_back({{"start", w.start},
                      {"end", w.end},
                      {"samples", w.samples},
                      {"mean_farm_power_w", w.mean_farm_power_w}});
    }
    return j.dump(2) + "\n";
}

RunSummary RunSummary::parse(const std::string& text) {
    RunSummary s;
    try {
        const auto j = ojson::parse(text);
        if (j.value("schema", "") != kSummarySchema) {
            throw ConfigError(std::string("summary schema must be ") + kSummarySchema);
        }
        s.scenario = j.at("scenario").get<std::string>();
        s.mode = parse_control_mode(j.at("mode").get<std::string>());
        s.seed = j.at("seed").get<std::uint64_t>();
        s.duration = j.at("duration").get<double>();
        s.psi_plant = parse_params(j.at("psi_plant").dump());
        for (const auto& w : j.at("windows")) {
            s.windows.push_back({w.at("start").get<double>(), w.at("end").get<double>(),
                                 w.at("mean_farm_power_w").get<double>(), w.at("samples").get<std::size_t>()});
        }
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("summary: ") + e.what());
    }
    return s;
}

RunSummary RunSummary::load(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

double RunSummary::mean(double start, double end) const {
    for (const auto& w : windows) {
        if (w.start == start && w.end == end) return w.mean_farm_power_w;
    }
    throw ConfigError(fmt::format("summary has no window [{}, {})", start, end));
}

Comparison compare_runs(const std::vector<RunSummary>& runs) {
    if (runs.empty()) throw ConfigError("nothing to compare");
    const auto& ref = runs.front();
    const RunSummary* greedy = nullptr;
    Comparison c;
    for (const auto& r : runs) {
        if (r.scenario != ref.scenario || r.seed != ref.seed || r.duration != ref.duration ||
            r.windows.size() != ref.windows.size()) {
            throw ConfigError("runs differ in scenario, seed or duration and cannot be compared");
        }
        for (const auto m : c.modes) {
            if (m == r.mode) throw ConfigError(std::string("mode ") + to_string(m) + " appears twice");
        }
        c.modes.push_back(r.mode);
        if (r.mode == ControlMode::Greedy) greedy = &r;
    }
    if (greedy == nullptr) throw ConfigError("comparison needs a greedy run as reference");
    for (std::size_t w = 0; w < ref.windows.size(); ++w) {
        c.windows.emplace_back(ref.windows[w].start, ref.windows[w].end);
        std::vector<double> p, g;
        const double base = greedy->windows[w].mean_farm_power_w;
        for (const auto& r : runs) {
            p.push_back(r.windows[w].mean_farm_power_w);
            g.push_back(&r == greedy ? 0.0 : 100.0 * (r.windows[w].mean_farm_power_w - base) / base);
        }
        c.power_w.push_back(std::move(p));
        c.gain_pct.push_back(std::move(g));
    }
    return c;
}

namespace {

std::string table_csv(const Comparison& c, const std::vector<std::vector<double>>& values, const char* suffix,
                      const char* format) {
    std::string out = "window_start,window_end";
    for (const auto m : c.modes) out += fmt::format(",{}{}", to_string(m), suffix);
    out += "\n";
    for (std::size_t w = 0; w < c.windows.size(); ++w) {
        out += fmt::format("{},{}", c.windows[w].first, c.windows[w].second);
        for (double v : values[w]) out += "," + fmt::format(fmt::runtime(format), v);
        out += "\n";
    }
    return out;
}

}  // namespace

std::string comparison_csv(const Comparison& c) {
    return table_csv(c, c.power_w, "_w", "{:.1f}");
}

std::string gains_csv(const Comparison& c) {
    return table_csv(c, c.gain_pct, "_gain_pct", "{:.3f}");
}

}  // namespace wakesteer

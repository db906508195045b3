// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <fmt/format.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <thread>

#include "message_gen.hpp"
#include "wakesteer/calibration.hpp"
#include "wakesteer/estimation.hpp"
#include "wakesteer/protocol.hpp"
#include "wakesteer/quadrature.hpp"
#include "wakesteer/report.hpp"
#include "wakesteer/scenario_io.hpp"
#include "wakesteer/transport.hpp"
#include "wakesteer/wake.hpp"
#include "wakesteer/yaw_optimizer.hpp"

using namespace wakesteer;
namespace fs = std::filesystem;

namespace {

const fs::path kData = WAKESTEER_DATA_DIR;
const fs::path kCli = WAKESTEER_CLI;
const fs::path kScratch = fs::path(WAKESTEER_SCRATCH_DIR) / "acceptance";

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

fs::path fresh_dir(const std::string& name) {
    const auto p = kScratch / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    const auto cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", kCli.string(), args, log.string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ 1

Outcome wake_identities() {
    Outcome o;
    const double d = 126.0;
    const WakeParams p;
    double worst = 0.0;
    for (double ct : {0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.99}) {
        for (double ti : {0.02, 0.06, 0.1, 0.2}) {
            const OperatingPoint op{0.0, ct, d};
            const double x0 = wake::near_wake_length(op, ti, p);
            const double centre = wake::total_deflection(x0, op, ti, p);
            const double got = wake::deficit(x0, centre, 0.0, op, ti, p).value;
            worst = std::max(worst, std::abs(got - (1.0 - std::sqrt(1.0 - ct))));
        }
    }
    o.check(worst <= 1e-12, fmt::format("centreline deficit error {:.2e}", worst));
    o.note(fmt::format("max |deficit(x0) - (1-sqrt(1-CT))| = {:.1e}", worst));

    double last = 1.0;
    for (double ct : {1e-1, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const OperatingPoint op{0.0, ct, d};
        const double x = 5 * d;
        const double v = wake::deficit(x, wake::total_deflection(x, op, 0.06, p), 0.0, op, 0.06, p).value;
        o.check(v < last && v >= 0.0, fmt::format("deficit not decreasing at CT={}", ct));
        last = v;
    }
    o.check(last < 1e-8, fmt::format("deficit {:.2e} at CT=1e-8", last));

    o.check(wake::initial_deflection_angle({0.0, 0.8, d}) == 0.0, "theta(0) != 0");
    double ratio_err = 0.0;
    for (double g = -30.0; g <= 30.0; g += 5.0) {
        const double gr = deg2rad(g);
        const auto s = wake::initial_sigmas({gr, 0.8, d});
        ratio_err = std::max(ratio_err, std::abs(s.y / s.z - std::cos(gr)));
    }
    o.check(ratio_err <= 1e-12, fmt::format("sigma ratio error {:.2e}", ratio_err));
    return o;
}

// ------------------------------------------------------------------ 2

Outcome direction_nodes() {
    Outcome o;
    const auto dist = gauss_hermite_nodes(0.0, 0.0735);
    const double want[] = {-0.21, -0.10, 0.0, 0.10, 0.21};
    std::string got;
    for (std::size_t k = 0; k < dist.nodes.size(); ++k) {
        got += fmt::format("{}{:+.4f}", k ? " " : "", dist.nodes[k].phi);
        if (k < 5) o.check(std::abs(dist.nodes[k].phi - want[k]) <= 0.005, fmt::format("node {} off", k));
    }
    o.check(dist.nodes.size() == 5, "expected 5 nodes");
    o.note("nodes " + got + " rad");
    return o;
}

// ------------------------------------------------------------------ 3

Outcome planted_calibration() {
    Outcome o;
    const auto farm = load_scenario(kData / "single_turbine.json").farm;
    const WakeParams truth;
    const double ti_levels[] = {0.02, 0.06, 0.10, 0.14};
    const double distances[] = {3.0, 5.0, 7.0, 10.0};
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto cases = synthesize_calibration_set(farm, truth, ti_levels, distances, SliceGrid{}, 0.05, seed);
        CalibrationConfig cfg;
        cfg.seed = seed;
        cfg.max_evaluations = 5000;
        const auto r = calibrate(cases, ParamBounds::reference(), cfg);
        const auto got = r.psi.to_array();
        const auto ref = truth.to_array();
        static const char* names[] = {"alpha", "beta", "k_a", "k_b", "a_d", "b_d"};
        double worst_rel = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            if (i == 4) {
                o.check(std::abs(got[i] - ref[i]) <= 0.01, fmt::format("seed {} a_d off by {:.4f}", seed, got[i] - ref[i]));
            } else {
                const double rel = std::abs(got[i] - ref[i]) / std::abs(ref[i]);
                worst_rel = std::max(worst_rel, rel);
                o.check(rel <= 0.10, fmt::format("seed {} {} off by {:.1f}%", seed, names[i], 100 * rel));
            }
        }
        o.check(r.evaluations <= 5000, fmt::format("seed {} used {} evaluations", seed, r.evaluations));
        o.note(fmt::format("seed {}: worst rel err {:.1f}%, |a_d err| {:.4f}, {} evals", seed, 100 * worst_rel,
                           std::abs(got[4] - ref[4]), r.evaluations));
    }
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 300.0, fmt::format("took {:.0f} s", elapsed));
    o.note(fmt::format("{:.1f} s", elapsed));
    return o;
}

// ------------------------------------------------------------------ 4

Outcome estimator() {
    Outcome o;
    const auto sf = load_scenario(kData / "benchmark_3x3.json");
    const auto params = load_params(kData / "params_calibrated.json");
    FarmScenario farm = sf.farm;
    farm.ambient = {0.0, 0.06, 8.0};
    const auto ev = evaluate_farm(farm, params);
    const auto n = farm.size();

    MeasurementWindow clean;
    for (const auto& t : ev.turbines) clean.power_w.push_back(t.power_w);
    clean.direction.assign(n, 0.0);
    const auto est = estimate_ambient(clean, sf.estimator_weights, EstimationBounds{}, farm, params);
    const double du = std::abs(est.xi.u_inf - 8.0);
    const double dti = 100.0 * std::abs(est.xi.i_inf - 0.06);
    o.check(du <= 0.05, fmt::format("noiseless U error {:.4f}", du));
    o.check(dti <= 0.5, fmt::format("noiseless TI error {:.3f} pp", dti));
    o.note(fmt::format("noiseless |dU| {:.1e} m/s, |dTI| {:.1e} pp", du, dti));

    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        MeasurementWindow noisy = clean;
        for (auto& p : noisy.power_w) p *= 1.0 + 0.02 * normal(rng);
        const auto e = estimate_ambient(noisy, sf.estimator_weights, EstimationBounds{}, farm, params);
        worst = std::max(worst, std::abs(e.xi.u_inf - 8.0));
    }
    o.check(worst <= 0.15, fmt::format("noisy U error {:.3f}", worst));
    o.note(fmt::format("2% noise, 20 seeds: max |dU| {:.3f} m/s", worst));
    return o;
}

// ------------------------------------------------------------------ 5

Outcome optimizer() {
    Outcome o;
    const auto params = load_params(kData / "params_calibrated.json");
    const auto sf = load_scenario(kData / "benchmark_3x3.json");
    const auto& farm = sf.farm;
    const auto n = farm.size();
    const auto bounds = YawBounds::uniform(n, sf.yaw_lower, sf.yaw_upper);

    double x_max = -1e300;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pos = farm.layout.positions[i];
        x[i] = pos.east * std::cos(farm.ambient.phi) + pos.north * std::sin(farm.ambient.phi);
        x_max = std::max(x_max, x[i]);
    }
    for (double sigma_deg : {0.0, 2.0}) {
        const auto r = optimize_yaw(farm.ambient, deg2rad(sigma_deg), bounds, farm, params);
        double last_row = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] > x_max - 1.0) last_row = std::max(last_row, std::abs(rad2deg(r.gamma[i])));
        }
        const std::vector<double> zeros(n, 0.0);
        const double greedy = robust_objective(zeros, farm.ambient, deg2rad(sigma_deg), farm, params);
        o.check(last_row <= 1.0, fmt::format("sigma {} last row |gamma| {:.2f} deg", sigma_deg, last_row));
        o.check(r.objective >= greedy && r.greedy_objective == greedy,
                fmt::format("sigma {} objective below greedy", sigma_deg));
        o.note(fmt::format("sigma {} deg: gain {:.2f}%, last row max |gamma| {:.2f} deg", sigma_deg,
                           100.0 * (r.objective - greedy) / greedy, last_row));
    }

    const auto pair = load_scenario(kData / "two_turbine_5d.json");
    const auto pb = YawBounds::uniform(2, pair.yaw_lower, pair.yaw_upper);
    double best_g = 0.0, best_f = -1.0;
    for (double g = rad2deg(pair.yaw_lower); g <= rad2deg(pair.yaw_upper) + 1e-9; g += 0.5) {
        const std::vector<double> gamma{deg2rad(g), 0.0};
        const double f = robust_objective(gamma, pair.farm.ambient, 0.0, pair.farm, params);
        if (f > best_f) {
            best_f = f;
            best_g = g;
        }
    }
    const auto r = optimize_yaw(pair.farm.ambient, 0.0, pb, pair.farm, params);
    const double g1 = rad2deg(r.gamma[0]);
    o.check(std::abs(g1 - best_g) <= 1.0, fmt::format("pair optimum {:.2f} vs sweep {:.1f}", g1, best_g));
    o.note(fmt::format("pair: optimiser {:.2f} deg, sweep {:.1f} deg", g1, best_g));
    return o;
}

// ------------------------------------------------------------------ 6

Outcome cosim_gains() {
    Outcome o;
    const auto dir = fresh_dir("compare");
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = run_cli(fmt::format("compare --manifest \"{}\" --seed 1 --duration 2000 --out \"{}\"",
                                       (kData / "manifests" / "greedy.json").string(), dir.string()),
                           dir / "compare.log");
    if (rc != 0) {
        o.check(false, fmt::format("compare exited with {}", rc));
        return o;
    }
    const auto greedy = RunSummary::load(dir / "greedy" / "summary.json");
    const auto ol = RunSummary::load(dir / "openloop" / "summary.json");
    const std::pair<double, double> steady[] = {{900, 1200}, {1200, 1500}, {1500, 1800}};
    auto gain = [&](const RunSummary& s, std::pair<double, double> w) {
        const double base = greedy.mean(w.first, w.second);
        return 100.0 * (s.mean(w.first, w.second) - base) / base;
    };
    for (const char* mode : {"closedloop_det", "closedloop_robust"}) {
        const auto s = RunSummary::load(dir / mode / "summary.json");
        const double before = s.mean(0, 600);
        const double dip = s.mean(600, 900);
        o.check(dip < before, fmt::format("{}: no dip in 600-900", mode));
        std::string gains;
        for (const auto& w : steady) {
            const double g = gain(s, w);
            const double g_ol = gain(ol, w);
            gains += fmt::format(" {:.2f}", g);
            o.check(g >= 3.0, fmt::format("{} {}-{} gain {:.2f}% < 3%", mode, w.first, w.second, g));
            o.check(g > g_ol, fmt::format("{} {}-{} gain {:.2f}% <= open loop {:.2f}%", mode, w.first, w.second,
                                          g, g_ol));
        }
        o.note(fmt::format("{} dip {:+.2f}%, steady gains{} %", mode, 100.0 * (dip - before) / before, gains));
    }
    std::string ol_gains;
    for (const auto& w : steady) ol_gains += fmt::format(" {:.2f}", gain(ol, w));
    o.note("openloop steady gains" + ol_gains + " %");
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 600.0, fmt::format("took {:.0f} s", elapsed));
    return o;
}

// ------------------------------------------------------------------ 7

Outcome protocol_checks() {
    Outcome o;
    using namespace protocol;
    std::mt19937_64 rng(7);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto m = test::random_message(rng);
        if (!(decode_frame(encode_frame(m)) == m)) ++mismatches;
    }
    o.check(mismatches == 0, fmt::format("{} round-trip mismatches", mismatches));

    auto frame_of = [](const std::string& payload) {
        std::vector<std::uint8_t> f(kHeaderSize + payload.size());
        const auto len = static_cast<std::uint32_t>(payload.size());
        for (std::size_t i = 0; i < 4; ++i) f[i] = static_cast<std::uint8_t>(len >> (8 * i));
        std::copy(payload.begin(), payload.end(), f.begin() + kHeaderSize);
        return f;
    };
    auto truncated = encode_frame(StopMsg{"end"});
    truncated.pop_back();
    const std::pair<std::vector<std::uint8_t>, ErrorKind> corrupt[] = {
        {truncated, ErrorKind::LengthMismatch},
        {frame_of("{\"type\":\"stop\",\"reason\":\"\xfe\"}"), ErrorKind::InvalidUtf8},
        {frame_of("{\"type\":\"stop\","), ErrorKind::InvalidJson},
        {frame_of("{\"type\":\"ping\"}"), ErrorKind::UnknownType},
    };
    for (const auto& [bytes, want] : corrupt) {
        bool rejected = false;
        try {
            decode_frame(bytes);
        } catch (const ProtocolError& e) {
            rejected = e.kind() == want;
        }
        o.check(rejected, std::string("not rejected as ") + to_string(want));
    }

    const int exchanges = 2000;
    transport::Listener listener(transport::Endpoint{"127.0.0.1", 0});
    const transport::Endpoint ep{"127.0.0.1", listener.port()};
    std::jthread peer([ep] {
        auto c = transport::connect(ep);
        for (;;) {
            const auto m = c.recv_frame();
            const auto* meas = std::get_if<MeasurementMsg>(&m);
            if (meas == nullptr) break;
            ControlMsg reply{meas->t, std::vector<TurbineCommand>(meas->turbines.size(), {0.1, 1.0})};
            c.send_frame(reply);
        }
    });
    auto conn = listener.accept();
    MeasurementMsg m{0.0, 1.0, std::vector<TurbineMeasurement>(9, {1.7e6, 0.01})};
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < exchanges; ++i) {
        m.t = i;
        conn.send_frame(m);
        const auto r = conn.recv_frame();
        if (!std::holds_alternative<ControlMsg>(r)) {
            o.check(false, "unexpected reply");
            break;
        }
    }
    const double per_exchange_ms = 1e3 * seconds_since(t0) / exchanges;
    conn.send_frame(StopMsg{"done"});
    o.check(per_exchange_ms < 10.0, fmt::format("round trip {:.3f} ms", per_exchange_ms));
    o.note(fmt::format("10000 fuzzed frames, 4 corruption classes, loopback round trip {:.3f} ms", per_exchange_ms));
    return o;
}

// ------------------------------------------------------------------ 8

Outcome determinism() {
    Outcome o;
    const auto manifest = kData / "manifests" / "closedloop_robust.json";
    std::string first;
    for (const char* name : {"run_a", "run_b"}) {
        const auto dir = fresh_dir(std::string("determinism_") + name);
        const int rc = run_cli(fmt::format("cosim --manifest \"{}\" --out \"{}\"", manifest.string(), dir.string()),
                               dir / "cosim.log");
        if (rc != 0) {
            o.check(false, fmt::format("cosim exited with {}", rc));
            return o;
        }
        const auto text = read_text_file(dir / "summary.json");
        if (first.empty()) {
            first = text;
        } else {
            o.check(text == first, "summary.json differs between runs");
        }
    }
    o.note(fmt::format("summary.json identical ({} bytes)", first.size()));
    return o;
}

}  // namespace

int main() {
    fs::create_directories(kScratch);
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"wake identities", wake_identities},
        {"direction quadrature nodes", direction_nodes},
        {"planted calibration recovery", planted_calibration},
        {"estimator self-consistency", estimator},
        {"optimizer structure", optimizer},
        {"closed-loop co-simulation gains", cosim_gains},
        {"protocol framing", protocol_checks},
        {"co-simulation determinism", determinism},
    };
    int failures = 0;
    int k = 1;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out.check(false, std::string("exception: ") + e.what());
        }
        if (!out.pass) ++failures;
        std::cout << fmt::format("{} {} {} ({:.1f} s): {}", out.pass ? "PASS" : "FAIL", k++, name, seconds_since(t0),
                                 out.detail)
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

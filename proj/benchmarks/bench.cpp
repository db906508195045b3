#include <benchmark/benchmark.h>

#include <random>

#include "wakesteer/calibration.hpp"
#include "wakesteer/estimation.hpp"
#include "wakesteer/protocol.hpp"
#include "wakesteer/scenario_io.hpp"
#include "wakesteer/yaw_optimizer.hpp"

using namespace wakesteer;

namespace {

const std::filesystem::path kData = WAKESTEER_DATA_DIR;

const ScenarioFile& benchmark_farm() {
    static const auto sf = load_scenario(kData / "benchmark_3x3.json");
    return sf;
}

const WakeParams& model() {
    static const auto p = load_params(kData / "params_calibrated.json");
    return p;
}

void BM_FarmEvaluation(benchmark::State& state) {
    auto farm = benchmark_farm().farm;
    for (std::size_t i = 0; i < farm.size(); ++i) farm.controls.yaw[i] = 0.3 * std::sin(double(i));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_farm(farm, model()).farm_power_w);
}
BENCHMARK(BM_FarmEvaluation);

void BM_RobustObjective(benchmark::State& state) {
    const auto& farm = benchmark_farm().farm;
    const std::vector<double> gamma(farm.size(), 0.2);
    const int nodes = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(robust_objective(gamma, farm.ambient, deg2rad(2.0), farm, model(), nodes));
    }
}
BENCHMARK(BM_RobustObjective)->Arg(1)->Arg(5)->Arg(9);

void BM_YawOptimization(benchmark::State& state) {
    const auto& sf = benchmark_farm();
    const auto bounds = YawBounds::uniform(sf.farm.size(), sf.yaw_lower, sf.yaw_upper);
    YawOptions opt;
    opt.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimize_yaw(sf.farm.ambient, 0.0, bounds, sf.farm, model(), opt).objective);
    }
}
BENCHMARK(BM_YawOptimization)->Unit(benchmark::kMillisecond);

void BM_Estimation(benchmark::State& state) {
    const auto& sf = benchmark_farm();
    const auto ev = evaluate_farm(sf.farm, model());
    MeasurementWindow w;
    for (const auto& t : ev.turbines) w.power_w.push_back(t.power_w);
    w.direction.assign(sf.farm.size(), 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_ambient(w, sf.estimator_weights, {}, sf.farm, model()).xi.u_inf);
    }
}
BENCHMARK(BM_Estimation)->Unit(benchmark::kMillisecond);

void BM_CalibrationCost(benchmark::State& state) {
    const auto farm = load_scenario(kData / "single_turbine.json").farm;
    const double ti[] = {0.06};
    const double dist[] = {3.0, 5.0, 7.0, 10.0};
    const auto cases = synthesize_calibration_set(farm, WakeParams{}, ti, dist, SliceGrid{}, 0.05, 1);
    for (auto _ : state) benchmark::DoNotOptimize(calibration_cost(model(), cases).cost);
}
BENCHMARK(BM_CalibrationCost)->Unit(benchmark::kMicrosecond);

void BM_FrameCodec(benchmark::State& state) {
    protocol::MeasurementMsg m{600.0, 1.0, std::vector<protocol::TurbineMeasurement>(9, {1.7e6, 0.0123})};
    const protocol::Message msg = m;
    for (auto _ : state) benchmark::DoNotOptimize(protocol::decode_frame(protocol::encode_frame(msg)));
}
BENCHMARK(BM_FrameCodec);

}  // namespace

BENCHMARK_MAIN();

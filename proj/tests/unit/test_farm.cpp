#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "support.hpp"
#include "wakesteer/error.hpp"
#include "wakesteer/farm.hpp"

using namespace wakesteer;

namespace {

FarmScenario pair(double spacing_d, double yaw_up_deg) {
    auto sc = test::scenario("two_turbine_5d.json").farm;
    sc.layout.positions[1].east = spacing_d * sc.turbine.diameter;
    sc.controls.yaw[0] = deg2rad(yaw_up_deg);
    return sc;
}

FarmScenario benchmark() { return test::scenario("benchmark_3x3.json").farm; }

}  // namespace

TEST(Turbine, TableInterpolatesAndFlagsClamping) {
    const auto spec = load_turbine(test::data_dir() / "nrel_5mw.json");
    const auto mid = spec.performance.at(8.25);
    const auto lo = spec.performance.at(8.0);
    const auto hi = spec.performance.at(8.5);
    EXPECT_NEAR(mid.c_t, 0.5 * (lo.c_t + hi.c_t), 1e-15);
    EXPECT_FALSE(mid.clamped);
    EXPECT_TRUE(spec.performance.at(1.0).clamped);
    EXPECT_TRUE(spec.performance.at(40.0).clamped);
}

TEST(Turbine, YawPowerLossFollowsCosineExponent) {
    const auto spec = load_turbine(test::data_dir() / "nrel_5mw.json");
    const double p0 = turbine_power(8.0, spec, 0.0, 1.0).power_w;
    const double p25 = turbine_power(8.0, spec, deg2rad(25.0), 1.0).power_w;
    EXPECT_NEAR(p25 / p0, 0.8311479491408205, 1e-12);
}

TEST(Turbine, DeratingScalesThrustAndPowerThroughActuatorDisk) {
    const auto spec = load_turbine(test::data_dir() / "nrel_5mw.json");
    const auto full = operating_coefficients(8.0, spec, 1.0);
    const auto derated = operating_coefficients(8.0, spec, 0.8);
    EXPECT_NEAR(derated.c_t, 0.8 * full.c_t, 1e-15);
    EXPECT_NEAR(derated.c_p / full.c_p, actuator_disk_cp(derated.c_t) / actuator_disk_cp(full.c_t), 1e-14);
    EXPECT_LT(derated.c_p, full.c_p);
    EXPECT_NEAR(axial_induction(0.8), 0.27639320225002106, 1e-15);
}

TEST(Turbine, RejectsInvalidTables) {
    EXPECT_THROW(PerformanceTable({{8.0, 0.7, 0.4}, {7.0, 0.7, 0.4}}), ConfigError);
    EXPECT_THROW(PerformanceTable({{8.0, 1.2, 0.4}}), ConfigError);
    EXPECT_THROW(PerformanceTable({{8.0, 0.7, 0.7}}), ConfigError);
}

TEST(Farm, AddedTurbulenceMatchesOracle) {
    EXPECT_NEAR(added_turbulence(0.8, 0.06, 5.0), 0.13646268106533663, 1e-15);
}

// Expected values from farm_two_turbine() in tests/oracles/wake_oracle.py.
TEST(Farm, AlignedPairMatchesOracle) {
    const auto ev = evaluate_farm(pair(5.0, 0.0), WakeParams{});
    EXPECT_NEAR(ev.turbines[0].u_rotor, 8.0, 1e-12);
    EXPECT_NEAR(ev.turbines[0].power_w, 1707224.9811500607, 1e-6);
    EXPECT_NEAR(ev.turbines[1].u_rotor, 5.715412090919461, 1e-10);
    EXPECT_NEAR(ev.turbines[1].i_rotor, 0.14126276986795455, 1e-12);
    EXPECT_NEAR(ev.turbines[1].power_w, 604433.2425349654, 1e-4);
}

TEST(Farm, YawedPairMatchesOracle) {
    const auto ev = evaluate_farm(pair(5.0, 20.0), WakeParams{});
    EXPECT_NEAR(ev.turbines[0].power_w, 1518812.2521327594, 1e-6);
    EXPECT_NEAR(ev.turbines[1].u_rotor, 6.057798318700878, 1e-10);
    EXPECT_NEAR(ev.turbines[1].power_w, 729009.1164025004, 1e-4);
    EXPECT_NEAR(ev.farm_power_w, ev.turbines[0].power_w + ev.turbines[1].power_w, 1e-6);
}

TEST(Farm, RotorGridWeightsSumToOne) {
    const auto pts = rotor_points(TurbineSpec{});
    EXPECT_EQ(pts.size(), 48u);
    double w = 0.0;
    for (const auto& p : pts) w += p.weight;
    EXPECT_NEAR(w, 1.0, 1e-15);
}

TEST(Farm, UpstreamOrderBreaksTiesByCrosswindThenIndex) {
    const std::vector<WindFramePoint> c{{100, 5}, {0, 3}, {100, -5}, {0, 3}};
    EXPECT_EQ(sort_upstream(c), (std::vector<std::size_t>{1, 3, 2, 0}));
}

TEST(Farm, WindFrameRotation) {
    const auto p = rotate_to_wind_frame(Position{0.0, 100.0}, std::numbers::pi / 2);
    EXPECT_NEAR(p.x, 100.0, 1e-12);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
}

TEST(Farm, InvariantUnderJointRotationOfLayoutAndWind) {
    auto sc = benchmark();
    sc.controls.yaw = {0.1, -0.2, 0.3, 0.05, -0.1, 0.2, 0.0, 0.1, -0.3};
    const auto ref = evaluate_farm(sc, WakeParams{});
    for (double rot : {0.3, 1.7, -2.5}) {
        auto r = sc;
        for (auto& p : r.layout.positions) {
            const double e = p.east, n = p.north;
            p.east = e * std::cos(rot) - n * std::sin(rot);
            p.north = e * std::sin(rot) + n * std::cos(rot);
        }
        r.ambient.phi = normalize_angle(sc.ambient.phi + rot);
        const auto ev = evaluate_farm(r, WakeParams{});
        for (std::size_t i = 0; i < sc.size(); ++i) {
            EXPECT_NEAR(ev.turbines[i].power_w, ref.turbines[i].power_w, 1e-6 * ref.turbines[i].power_w);
        }
    }
}

TEST(Farm, InvariantUnderTurbinePermutation) {
    auto sc = benchmark();
    sc.controls.yaw = {0.1, -0.2, 0.3, 0.05, -0.1, 0.2, 0.0, 0.1, -0.3};
    const auto ref = evaluate_farm(sc, WakeParams{});
    const std::vector<std::size_t> perm{8, 3, 5, 0, 7, 1, 6, 2, 4};
    auto p = sc;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        p.layout.positions[k] = sc.layout.positions[perm[k]];
        p.controls.yaw[k] = sc.controls.yaw[perm[k]];
    }
    const auto ev = evaluate_farm(p, WakeParams{});
    for (std::size_t k = 0; k < perm.size(); ++k) {
        EXPECT_DOUBLE_EQ(ev.turbines[k].power_w, ref.turbines[perm[k]].power_w);
    }
}

TEST(Farm, MirrorSymmetryWithoutRotationDeflection) {
    WakeParams p;
    p.a_d = 0.0;
    p.b_d = 0.0;
    auto sc = pair(5.0, 18.0);
    sc.layout.positions[1].north = 30.0;
    auto mirrored = sc;
    mirrored.controls.yaw[0] = -sc.controls.yaw[0];
    mirrored.layout.positions[1].north = -30.0;
    EXPECT_NEAR(evaluate_farm(sc, p).farm_power_w, evaluate_farm(mirrored, p).farm_power_w, 1e-6);
}

TEST(Farm, WakesOnlyActDownstream) {
    auto sc = pair(5.0, 0.0);
    sc.ambient.phi = std::numbers::pi;  // wind now blows toward -east: turbine 1 is upstream
    const auto ev = evaluate_farm(sc, WakeParams{});
    EXPECT_NEAR(ev.turbines[1].u_rotor, 8.0, 1e-12);
    EXPECT_LT(ev.turbines[0].u_rotor, 8.0);
}

TEST(Farm, DownstreamPowerRecoversWithSpacing) {
    double prev = 0.0;
    for (double s : {3.0, 5.0, 8.0, 12.0, 20.0}) {
        const double p = evaluate_farm(pair(s, 0.0), WakeParams{}).turbines[1].power_w;
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(Farm, FlowSamplesAreFreeStreamUpstream) {
    const auto sc = pair(5.0, 10.0);
    const std::vector<WorldPoint> pts{{-300.0, 0.0, 90.0}, {-10.0, 40.0, 60.0}};
    for (double u : sample_flow(sc, WakeParams{}, pts)) EXPECT_DOUBLE_EQ(u, 8.0);
}

TEST(Farm, ValidationRejectsBadScenarios) {
    auto sc = pair(5.0, 0.0);
    sc.layout.positions[1].east = 100.0;
    EXPECT_THROW(evaluate_farm(sc, WakeParams{}), ConfigError);
    auto sc2 = pair(5.0, 0.0);
    sc2.controls.yaw.push_back(0.0);
    EXPECT_THROW(evaluate_farm(sc2, WakeParams{}), DomainError);
    auto sc3 = pair(5.0, 0.0);
    sc3.controls.thrust_scale[0] = 1.2;
    EXPECT_THROW(evaluate_farm(sc3, WakeParams{}), DomainError);
    auto sc4 = pair(5.0, 0.0);
    sc4.ambient.u_inf = 0.0;
    EXPECT_THROW(evaluate_farm(sc4, WakeParams{}), DomainError);
}

TEST(Farm, NormalizeAngleRange) {
    EXPECT_NEAR(normalize_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
    EXPECT_NEAR(normalize_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
    EXPECT_NEAR(normalize_angle(0.5 - 4 * std::numbers::pi), 0.5, 1e-12);
}

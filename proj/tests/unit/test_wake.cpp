#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wakesteer/error.hpp"
#include "wakesteer/wake.hpp"

using namespace wakesteer;

namespace {

constexpr double kD = 126.0;
const double g20 = 20.0 * std::numbers::pi / 180.0;

}  // namespace

// Expected values below come from tests/oracles/wake_oracle.py.
TEST(Wake, NearWakeLengthMatchesOracle) {
    EXPECT_NEAR(wake::near_wake_length({0.0, 0.8, 1.0}, 0.06, WakeParams{}), 2.7589541264970907, 1e-12);
    EXPECT_NEAR(wake::near_wake_length({g20, 0.8, kD}, 0.06, WakeParams{}), 326.66367305327464, 1e-9);
}

TEST(Wake, InitialDeflectionAngleMatchesOracle) {
    EXPECT_NEAR(wake::initial_deflection_angle({g20, 0.8, kD}), 0.055916039255633855, 1e-14);
    EXPECT_NEAR(wake::initial_deflection_angle({-g20, 0.8, kD}), -0.055916039255633855, 1e-14);
}

TEST(Wake, ExpansionAndInitialWidthMatchOracle) {
    EXPECT_NEAR(wake::wake_expansion(0.06, WakeParams{}).k_y, 0.011409, 1e-15);
    EXPECT_NEAR(wake::wake_expansion(0.12, WakeParams{}).k_z, 0.021849, 1e-15);
    const auto s = wake::initial_sigmas({g20, 0.8, kD});
    EXPECT_NEAR(s.y, 41.861170536486505, 1e-12);
    EXPECT_NEAR(s.z, 44.54772721475249, 1e-12);
}

TEST(Wake, TotalDeflectionMatchesOracle) {
    const OperatingPoint op{g20, 0.8, kD};
    EXPECT_NEAR(wake::total_deflection(5 * kD, op, 0.06, WakeParams{}), 30.736885775316193, 1e-9);
    EXPECT_NEAR(wake::total_deflection(7 * kD, op, 0.06, WakeParams{}), 39.90780004114515, 1e-9);
}

TEST(Wake, CentrelineDeficitAtNearWakeEndIsActuatorDisk) {
    for (double ct : {0.2, 0.5, 0.76, 0.95}) {
        const OperatingPoint op{0.0, ct, kD};
        GaussianWake w(op, 0.06, WakeParams{});
        const double x0 = w.geometry().x0;
        const auto sec = w.section(x0);
        const double got = w.deficit(x0, sec.center, 0.0).value;
        EXPECT_NEAR(got, 1.0 - std::sqrt(1.0 - ct), 1e-12) << "ct=" << ct;
    }
}

TEST(Wake, DeficitVanishesWithThrust) {
    double prev = 1.0;
    for (double ct : {1e-2, 1e-4, 1e-6, 1e-8}) {
        GaussianWake w({0.0, ct, kD}, 0.06, WakeParams{});
        const double d = w.deficit(5 * kD, 0.0, 0.0).value;
        EXPECT_LT(d, prev);
        EXPECT_LT(d, ct);
        prev = d;
    }
}

TEST(Wake, NoYawNoInitialDeflection) {
    EXPECT_EQ(wake::initial_deflection_angle({0.0, 0.8, kD}), 0.0);
    // Only the rotation-induced offset remains.
    const OperatingPoint op{0.0, 0.8, kD};
    const WakeParams p;
    EXPECT_NEAR(wake::total_deflection(900.0, op, 0.06, p), p.a_d * kD + p.b_d * 900.0, 1e-12);
}

TEST(Wake, InitialWidthRatioIsCosineOfYaw) {
    for (double deg : {-40.0, -10.0, 0.0, 15.0, 30.0, 60.0}) {
        const double g = deg * std::numbers::pi / 180.0;
        const auto s = wake::initial_sigmas({g, 0.7, kD});
        EXPECT_NEAR(s.y / s.z, std::cos(g), 1e-15);
    }
}

TEST(Wake, WidthsHeldInNearWakeAndGrowAfter) {
    GaussianWake w({0.2, 0.8, kD}, 0.08, WakeParams{});
    const auto& g = w.geometry();
    EXPECT_EQ(w.sigmas(0.5 * g.x0).y, g.sigma_y0);
    double prev_y = g.sigma_y0;
    for (double x = g.x0 + 10.0; x < 20 * kD; x += 50.0) {
        const auto s = w.sigmas(x);
        EXPECT_GT(s.y, prev_y);
        prev_y = s.y;
    }
}

TEST(Wake, DeficitIsGaussianAboutTheCentreline) {
    GaussianWake w({0.3, 0.8, kD}, 0.06, WakeParams{});
    const double x = 6 * kD;
    const auto sec = w.section(x);
    for (double dy : {10.0, 40.0, 90.0}) {
        EXPECT_NEAR(w.deficit(x, sec.center + dy, 5.0).value, w.deficit(x, sec.center - dy, -5.0).value, 1e-15);
        EXPECT_LT(w.deficit(x, sec.center + dy, 0.0).value, sec.amplitude);
    }
}

TEST(Wake, YawSignMirrorsDeflectionWithoutRotation) {
    WakeParams p;
    p.a_d = 0.0;
    p.b_d = 0.0;
    for (double x : {100.0, 400.0, 900.0}) {
        const double plus = wake::total_deflection(x, {0.35, 0.8, kD}, 0.06, p);
        const double minus = wake::total_deflection(x, {-0.35, 0.8, kD}, 0.06, p);
        EXPECT_GT(plus, 0.0);
        EXPECT_NEAR(plus, -minus, 1e-12);
    }
}

TEST(Wake, DeflectionIsContinuousAtNearWakeEnd) {
    GaussianWake w({0.4, 0.8, kD}, 0.06, WakeParams{});
    const double x0 = w.geometry().x0;
    EXPECT_NEAR(w.deflection(x0 - 1e-7), w.deflection(x0 + 1e-7), 1e-6);
}

TEST(Wake, RejectsOutOfDomainInputs) {
    EXPECT_THROW(GaussianWake({0.0, 1.0, kD}, 0.06, WakeParams{}), DomainError);
    EXPECT_THROW(GaussianWake({0.0, 0.0, kD}, 0.06, WakeParams{}), DomainError);
    EXPECT_THROW(GaussianWake({1.6, 0.5, kD}, 0.06, WakeParams{}), DomainError);
    EXPECT_THROW(GaussianWake({0.0, 0.5, kD}, 0.0, WakeParams{}), DomainError);
    WakeParams bad;
    bad.k_a = 0.0;
    bad.k_b = -1e-3;
    EXPECT_THROW(GaussianWake({0.0, 0.5, kD}, 0.06, bad), DomainError);
    GaussianWake w({0.0, 0.5, kD}, 0.06, WakeParams{});
    EXPECT_THROW(w.deficit(0.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(w.deficit(-5.0, 0.0, 0.0), DomainError);
}

TEST(Wake, AmplitudeRadicandStaysPositiveForValidThrust) {
    // Widths never shrink below their initial values, so 1 - C_T bounds the radicand from below.
    for (double ct : {0.5, 0.9, 0.999}) {
        GaussianWake w({0.0, ct, kD}, 0.001, WakeParams{});
        for (double x = 1.0; x < 30 * kD; x *= 1.7) {
            const auto s = w.deficit(x, 0.0, 0.0);
            EXPECT_FALSE(s.clamped);
            EXPECT_LE(s.value, 1.0 - std::sqrt(1.0 - ct) + 1e-15);
        }
    }
}

TEST(Wake, ParamsArrayRoundTrip) {
    WakeParams p{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    EXPECT_EQ(WakeParams::from_array(p.to_array()), p);
    const double short_v[] = {1.0, 2.0};
    EXPECT_THROW(WakeParams::from_array(short_v), DomainError);
}

#pragma once

// Multi-turbine steady-state evaluation: wind-frame rotation, upstream
// ordering, root-sum-square deficit superposition, added turbulence and
// rotor-averaged power.
//
// World frame: east/north in metres. The wind direction phi is the direction
// the wind blows toward, measured counter-clockwise from east. Wind-frame
// coordinates come from rotating the world by -phi:
//   x =  east cos(phi) + north sin(phi)     (downstream)
//   y = -east sin(phi) + north cos(phi)     (crosswind)

#include <cstddef>
#include <span>
#include <vector>

#include "wakesteer/turbine.hpp"
#include "wakesteer/wake.hpp"

namespace wakesteer {

struct Position {
    double east = 0.0;
    double north = 0.0;
};

struct FarmLayout {
    std::vector<Position> positions;

    std::size_t size() const { return positions.size(); }
    /// Requires at least one turbine and pairwise spacing above one diameter.
    void validate(double diameter) const;
};

struct AmbientConditions {
    double phi = 0.0;      // [rad], normalised to (-pi, pi]
    double i_inf = 0.06;
    double u_inf = 8.0;    // [m/s]

    void validate() const;
};

/// Wrap an angle to (-pi, pi].
double normalize_angle(double a);

struct ControlVector {
    std::vector<double> yaw;           // [rad]
    std::vector<double> thrust_scale;  // (0, 1]

    static ControlVector greedy(std::size_t n);
    std::size_t size() const { return yaw.size(); }
    void validate(std::size_t n) const;

    friend bool operator==(const ControlVector&, const ControlVector&) = default;
};

struct FarmScenario {
    TurbineSpec turbine;
    FarmLayout layout;
    AmbientConditions ambient;
    ControlVector controls;
    double shear_exponent = 0.0;  // power-law inflow profile; 0 = uniform

    std::size_t size() const { return layout.size(); }
    void validate() const;
};

struct WindFramePoint {
    double x = 0.0;
    double y = 0.0;
};

struct WorldPoint {
    double east = 0.0;
    double north = 0.0;
    double z = 0.0;  // height above ground [m]
};

struct RotorPoint {
    double y = 0.0;  // crosswind offset from hub [m]
    double z = 0.0;  // vertical offset from hub [m]
    double weight = 0.0;
};

struct TurbineState {
    double u_rotor = 0.0;
    double i_rotor = 0.0;
    double c_t = 0.0;
    double c_p = 0.0;
    double power_w = 0.0;
    bool deficit_clamped = false;
    bool table_clamped = false;
};

struct FarmEvaluation {
    std::vector<TurbineState> turbines;
    double farm_power_w = 0.0;

    bool any_clamped() const;
};

/// A wake already resolved for an upstream turbine, positioned in the wind frame.
struct UpstreamWake {
    WindFramePoint hub;
    double hub_height = 0.0;
    GaussianWake wake;
};

struct RotorSpeed {
    double u_rotor = 0.0;
    bool clamped = false;
};

std::vector<WindFramePoint> rotate_to_wind_frame(const FarmLayout& layout, double phi);
WindFramePoint rotate_to_wind_frame(const Position& p, double phi);

/// Ascending downstream coordinate; ties by crosswind coordinate, then index.
std::vector<std::size_t> sort_upstream(std::span<const WindFramePoint> coords);

/// Area-weighted polar grid on the rotor disk. Weights sum to one.
std::vector<RotorPoint> rotor_points(const TurbineSpec& spec, int n_radial = 4, int n_azimuthal = 12);

/// Area average of U_inf (1 - sqrt(sum_j d_j^2)) * shear(z) over the rotor grid.
RotorSpeed rotor_effective_speed(const WindFramePoint& rotor, double hub_height,
                                 std::span<const UpstreamWake> upstream,
                                 const AmbientConditions& ambient, std::span<const RotorPoint> grid,
                                 double shear_exponent = 0.0);

/// sqrt(I_inf^2 + max_j(overlap_j * I+_j)^2) with the added turbulence
/// I+ = 0.73 a^0.8325 I_inf^0.0325 (x/D)^-0.32 of each upstream wake and the
/// overlap measured as the weighted share of grid points inside the 2-sigma ellipse.
double rotor_effective_ti(const WindFramePoint& rotor, double hub_height,
                          std::span<const UpstreamWake> upstream, const AmbientConditions& ambient,
                          std::span<const RotorPoint> grid);

/// Added turbulence intensity of one upstream turbine at x/D diameters.
double added_turbulence(double c_t, double i_inf, double x_over_d);

FarmEvaluation evaluate_farm(const FarmScenario& scenario, const WakeParams& params);

/// Wind speed at arbitrary world points using the same superposition as the rotors.
std::vector<double> sample_flow(const FarmScenario& scenario, const WakeParams& params,
                                std::span<const WorldPoint> points);

}  // namespace wakesteer

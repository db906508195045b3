#include "wakesteer/farm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wakesteer/error.hpp"

namespace wakesteer {
namespace {

// Turbines closer than this in the streamwise direction do not interact.
constexpr double kMinStreamwise = 1e-6;

double shear_factor(double z_above_ground, double hub_height, double exponent) {
    if (exponent == 0.0) {
        return 1.0;
    }
    if (z_above_ground <= 0.0) {
        return 0.0;
    }
    return std::pow(z_above_ground / hub_height, exponent);
}

struct ResolvedFarm {
    FarmEvaluation evaluation;
    std::vector<UpstreamWake> wakes;  // in upstream order
};

ResolvedFarm resolve_farm(const FarmScenario& sc, const WakeParams& params) {
    sc.validate();
    const std::size_t n = sc.size();
    const auto coords = rotate_to_wind_frame(sc.layout, sc.ambient.phi);
    const auto order = sort_upstream(coords);
    const auto grid = rotor_points(sc.turbine);

    ResolvedFarm out;
    out.evaluation.turbines.resize(n);
    out.wakes.reserve(n);

    for (std::size_t i : order) {
        auto& st = out.evaluation.turbines[i];
        const auto speed = rotor_effective_speed(coords[i], sc.turbine.hub_height, out.wakes,
                                                 sc.ambient, grid, sc.shear_exponent);
        st.u_rotor = speed.u_rotor;
        st.deficit_clamped = speed.clamped;
        st.i_rotor = rotor_effective_ti(coords[i], sc.turbine.hub_height, out.wakes, sc.ambient, grid);

        const auto pw = turbine_power(st.u_rotor, sc.turbine, sc.controls.yaw[i], sc.controls.thrust_scale[i]);
        st.c_t = pw.c_t;
        st.c_p = pw.c_p;
        st.power_w = pw.power_w;
        st.table_clamped = pw.clamped;

        const OperatingPoint op{sc.controls.yaw[i], st.c_t, sc.turbine.diameter};
        out.wakes.push_back(UpstreamWake{coords[i], sc.turbine.hub_height, GaussianWake(op, st.i_rotor, params)});
    }
    // Summed in index order so the total does not depend on evaluation order.
    for (const auto& t : out.evaluation.turbines) {
        out.evaluation.farm_power_w += t.power_w;
    }
    return out;
}

}  // namespace

void FarmLayout::validate(double diameter) const {
    if (positions.empty()) {
        throw ConfigError("farm layout needs at least one turbine");
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const double d = std::hypot(positions[i].east - positions[j].east,
                                        positions[i].north - positions[j].north);
            if (!(d > diameter)) {
                throw ConfigError("turbines " + std::to_string(i) + " and " + std::to_string(j) +
                                  " are closer than one rotor diameter");
            }
        }
    }
}

void AmbientConditions::validate() const {
    if (!(u_inf > 0.0)) {
        throw DomainError("free-stream speed must be positive");
    }
    if (!(i_inf > 0.0 && i_inf < 1.0)) {
        throw DomainError("ambient turbulence intensity must lie in (0,1)");
    }
    if (!std::isfinite(phi)) {
        throw DomainError("wind direction must be finite");
    }
}

double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) {
        a += two_pi;
    } else if (a > std::numbers::pi) {
        a -= two_pi;
    }
    return a;
}

ControlVector ControlVector::greedy(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

void ControlVector::validate(std::size_t n) const {
    if (yaw.size() != n || thrust_scale.size() != n) {
        throw DomainError("control vector length does not match the number of turbines");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(yaw[i]) < std::numbers::pi / 2)) {
            throw DomainError("yaw of turbine " + std::to_string(i) + " exceeds pi/2");
        }
        if (!(thrust_scale[i] > 0.0 && thrust_scale[i] <= 1.0)) {
            throw DomainError("thrust_scale of turbine " + std::to_string(i) + " outside (0,1]");
        }
    }
}

void FarmScenario::validate() const {
    turbine.validate();
    layout.validate(turbine.diameter);
    ambient.validate();
    controls.validate(layout.size());
}

bool FarmEvaluation::any_clamped() const {
    return std::any_of(turbines.begin(), turbines.end(),
                       [](const TurbineState& t) { return t.deficit_clamped || t.table_clamped; });
}

WindFramePoint rotate_to_wind_frame(const Position& p, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {p.east * c + p.north * s, -p.east * s + p.north * c};
}

std::vector<WindFramePoint> rotate_to_wind_frame(const FarmLayout& layout, double phi) {
    std::vector<WindFramePoint> out;
    out.reserve(layout.size());
    for (const auto& p : layout.positions) {
        out.push_back(rotate_to_wind_frame(p, phi));
    }
    return out;
}

std::vector<std::size_t> sort_upstream(std::span<const WindFramePoint> coords) {
    std::vector<std::size_t> order(coords.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (coords[a].x != coords[b].x) return coords[a].x < coords[b].x;
        if (coords[a].y != coords[b].y) return coords[a].y < coords[b].y;
        return a < b;
    });
    return order;
}

std::vector<RotorPoint> rotor_points(const TurbineSpec& spec, int n_radial, int n_azimuthal) {
    if (n_radial < 1 || n_azimuthal < 3) {
        throw DomainError("rotor grid needs n_radial >= 1 and n_azimuthal >= 3");
    }
    const double radius = 0.5 * spec.diameter;
    const double nr = n_radial;
    std::vector<RotorPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_radial * n_azimuthal));
    for (int k = 0; k < n_radial; ++k) {
        // Annulus [k, k+1]/nr of the radius, sampled at its mid radius.
        const double r = radius * (k + 0.5) / nr;
        const double area_share = ((k + 1.0) * (k + 1.0) - k * k) / (nr * nr);
        for (int m = 0; m < n_azimuthal; ++m) {
            const double a = 2.0 * std::numbers::pi * m / n_azimuthal;
            pts.push_back({r * std::cos(a), r * std::sin(a), area_share / n_azimuthal});
        }
    }
    return pts;
}

RotorSpeed rotor_effective_speed(const WindFramePoint& rotor, double hub_height,
                                 std::span<const UpstreamWake> upstream,
                                 const AmbientConditions& ambient, std::span<const RotorPoint> grid,
                                 double shear_exponent) {
    RotorSpeed out;
    std::vector<double> sum_sq(grid.size(), 0.0);
    for (const auto& w : upstream) {
        const double dx = rotor.x - w.hub.x;
        if (dx <= kMinStreamwise) {
            continue;
        }
        const auto sec = w.wake.section(dx);
        out.clamped = out.clamped || sec.clamped;
        const double dy = rotor.y - w.hub.y;
        const double dz = hub_height - w.hub_height;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const double d = sec.deficit(dy + grid[p].y, dz + grid[p].z);
            sum_sq[p] += d * d;
        }
    }
    double u = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double shear = shear_factor(hub_height + grid[p].z, hub_height, shear_exponent);
        u += grid[p].weight * ambient.u_inf * (1.0 - std::sqrt(sum_sq[p])) * shear;
    }
    out.u_rotor = u;
    return out;
}

double added_turbulence(double c_t, double i_inf, double x_over_d) {
    const double a = axial_induction(c_t);
    return 0.73 * std::pow(a, 0.8325) * std::pow(i_inf, 0.0325) * std::pow(x_over_d, -0.32);
}

double rotor_effective_ti(const WindFramePoint& rotor, double hub_height,
                          std::span<const UpstreamWake> upstream, const AmbientConditions& ambient,
                          std::span<const RotorPoint> grid) {
    double dominant = 0.0;
    for (const auto& w : upstream) {
        const double dx = rotor.x - w.hub.x;
        if (dx <= kMinStreamwise) {
            continue;
        }
        const auto sec = w.wake.section(dx);
        const double dy = rotor.y - w.hub.y - sec.center;
        const double dz = hub_height - w.hub_height;
        double overlap = 0.0;
        for (const auto& p : grid) {
            const double ey = (dy + p.y) / (2.0 * sec.sigma_y);
            const double ez = (dz + p.z) / (2.0 * sec.sigma_z);
            if (ey * ey + ez * ez <= 1.0) {
                overlap += p.weight;
            }
        }
        if (overlap <= 0.0) {
            continue;
        }
        const auto& op = w.wake.operating_point();
        const double added = overlap * added_turbulence(op.c_t, ambient.i_inf, dx / op.diameter);
        dominant = std::max(dominant, added);
    }
    return std::sqrt(ambient.i_inf * ambient.i_inf + dominant * dominant);
}

FarmEvaluation evaluate_farm(const FarmScenario& scenario, const WakeParams& params) {
    return resolve_farm(scenario, params).evaluation;
}

std::vector<double> sample_flow(const FarmScenario& scenario, const WakeParams& params,
                                std::span<const WorldPoint> points) {
    const auto farm = resolve_farm(scenario, params);
    const double hub = scenario.turbine.hub_height;
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        const auto c = rotate_to_wind_frame(Position{pt.east, pt.north}, scenario.ambient.phi);
        double sum_sq = 0.0;
        for (const auto& w : farm.wakes) {
            const double dx = c.x - w.hub.x;
            if (dx <= kMinStreamwise) {
                continue;
            }
            const double d = w.wake.section(dx).deficit(c.y - w.hub.y, pt.z - w.hub_height);
            sum_sq += d * d;
        }
        out.push_back(scenario.ambient.u_inf * (1.0 - std::sqrt(sum_sq)) *
                      shear_factor(pt.z, hub, scenario.shear_exponent));
    }
    return out;
}

}  // namespace wakesteer

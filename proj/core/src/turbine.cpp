#include "wakesteer/turbine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wakesteer/error.hpp"

namespace wakesteer {

PerformanceTable::PerformanceTable(std::vector<PerformanceRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw ConfigError("performance table is empty");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (i > 0 && !(r.wind_speed > rows_[i - 1].wind_speed)) {
            throw ConfigError("performance table must be strictly sorted by wind speed");
        }
        if (!(r.c_t > 0.0 && r.c_t < 1.0)) {
            throw ConfigError("performance table C_T must lie in (0,1)");
        }
        if (!(r.c_p > 0.0 && r.c_p < 16.0 / 27.0)) {
            throw ConfigError("performance table C_P must lie in (0, 16/27)");
        }
    }
}

PerformanceTable::Lookup PerformanceTable::at(double u) const {
    if (rows_.empty()) {
        throw ConfigError("performance table is empty");
    }
    if (u <= rows_.front().wind_speed) {
        return {rows_.front().c_t, rows_.front().c_p, u < rows_.front().wind_speed};
    }
    if (u >= rows_.back().wind_speed) {
        return {rows_.back().c_t, rows_.back().c_p, u > rows_.back().wind_speed};
    }
    auto hi = std::upper_bound(rows_.begin(), rows_.end(), u,
                               [](double v, const PerformanceRow& r) { return v < r.wind_speed; });
    auto lo = hi - 1;
    const double w = (u - lo->wind_speed) / (hi->wind_speed - lo->wind_speed);
    return {lo->c_t + w * (hi->c_t - lo->c_t), lo->c_p + w * (hi->c_p - lo->c_p), false};
}

double TurbineSpec::rotor_area() const {
    return std::numbers::pi * diameter * diameter / 4.0;
}

void TurbineSpec::validate() const {
    if (!(diameter > 0.0) || !(hub_height > 0.0)) {
        throw ConfigError("turbine diameter and hub height must be positive");
    }
    if (!(yaw_power_exponent > 0.0)) {
        throw ConfigError("yaw power exponent must be positive");
    }
    if (!(air_density > 0.0)) {
        throw ConfigError("air density must be positive");
    }
    if (performance.empty()) {
        throw ConfigError("turbine has no performance table");
    }
}

double axial_induction(double c_t) {
    return 0.5 * (1.0 - std::sqrt(1.0 - c_t));
}

double actuator_disk_cp(double c_t) {
    const double a = axial_induction(c_t);
    return 4.0 * a * (1.0 - a) * (1.0 - a);
}

PowerResult operating_coefficients(double u_rotor, const TurbineSpec& spec, double thrust_scale) {
    if (!(thrust_scale > 0.0 && thrust_scale <= 1.0)) {
        throw DomainError("thrust_scale must lie in (0,1]");
    }
    const auto lk = spec.performance.at(u_rotor);
    PowerResult r;
    r.clamped = lk.clamped;
    r.c_t = lk.c_t * thrust_scale;
    r.c_p = lk.c_p;
    if (thrust_scale < 1.0) {
        r.c_p *= actuator_disk_cp(r.c_t) / actuator_disk_cp(lk.c_t);
    }
    return r;
}

PowerResult turbine_power(double u_rotor, const TurbineSpec& spec, double yaw, double thrust_scale) {
    if (!(u_rotor > 0.0)) {
        throw DomainError("rotor-effective wind speed must be positive");
    }
    auto r = operating_coefficients(u_rotor, spec, thrust_scale);
    const double yaw_loss = std::pow(std::cos(yaw), spec.yaw_power_exponent);
    r.power_w = 0.5 * spec.air_density * spec.rotor_area() * r.c_p * u_rotor * u_rotor * u_rotor * yaw_loss;
    return r;
}

}  // namespace wakesteer

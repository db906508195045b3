#pragma once

#include <string>
#include <vector>

namespace wakesteer {

struct PerformanceRow {
    double wind_speed = 0.0;  // [m/s]
    double c_t = 0.0;
    double c_p = 0.0;
};

/// Tabulated thrust and power coefficients, linearly interpolated in wind speed.
/// Lookups outside the table are clamped to the nearest row and flagged.
class PerformanceTable {
public:
    struct Lookup {
        double c_t = 0.0;
        double c_p = 0.0;
        bool clamped = false;
    };

    PerformanceTable() = default;
    explicit PerformanceTable(std::vector<PerformanceRow> rows);

    Lookup at(double wind_speed) const;
    const std::vector<PerformanceRow>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

private:
    std::vector<PerformanceRow> rows_;
};

struct TurbineSpec {
    std::string name = "turbine";
    double diameter = 126.0;            // [m]
    double hub_height = 90.0;           // [m]
    PerformanceTable performance;
    double yaw_power_exponent = 1.88;   // p_P in cos(gamma)^p_P
    double air_density = 1.225;         // [kg/m^3]

    double rotor_area() const;
    void validate() const;
};

struct PowerResult {
    double power_w = 0.0;
    double c_t = 0.0;
    double c_p = 0.0;
    bool clamped = false;
};

/// a = (1 - sqrt(1 - C_T)) / 2
double axial_induction(double c_t);

/// Actuator-disk power coefficient 4a(1-a)^2 for a given thrust coefficient.
double actuator_disk_cp(double c_t);

/// Table C_T and C_P at `u_rotor`, with the thrust scaled by `thrust_scale`
/// and C_P rescaled through the actuator-disk relation.
PowerResult operating_coefficients(double u_rotor, const TurbineSpec& spec, double thrust_scale);

/// 1/2 rho A C_P u^3 cos(gamma)^p_P
PowerResult turbine_power(double u_rotor, const TurbineSpec& spec, double yaw, double thrust_scale);

}  // namespace wakesteer

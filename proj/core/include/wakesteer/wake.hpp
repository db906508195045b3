#pragma once

// Single-wake mathematics in the wind-aligned frame of one turbine.
//
// Frame: origin at the hub, x downstream, y crosswind, z up from hub height.
// Yaw sign: a positive misalignment gamma produces a positive initial
// deflection angle theta and pushes the wake centreline toward +y.

#include <array>
#include <span>

namespace wakesteer {

/// Tunable surrogate parameters (alpha, beta, k_a, k_b, a_d, b_d).
/// Defaults are the high-fidelity calibrated optimum.
struct WakeParams {
    double alpha = 3.16;
    double beta = 0.328;
    double k_a = 0.174;
    double k_b = 9.69e-4;
    double a_d = -1.34e-3;   // rotation deflection offset [rotor diameters]
    double b_d = -2.68e-3;   // rotation deflection slope [m per m downstream]

    static constexpr std::size_t kSize = 6;

    std::array<double, kSize> to_array() const { return {alpha, beta, k_a, k_b, a_d, b_d}; }
    static WakeParams from_array(std::span<const double> v);

    /// Throws DomainError unless alpha, beta > 0 and the expansion rate stays
    /// positive for every turbulence intensity in [0.001, 0.5].
    void validate() const;

    friend bool operator==(const WakeParams&, const WakeParams&) = default;
};

struct OperatingPoint {
    double gamma = 0.0;      // yaw misalignment [rad]
    double c_t = 0.0;        // thrust coefficient
    double diameter = 0.0;   // rotor diameter [m]

    void validate() const;
};

struct WakeGeometry {
    double x0 = 0.0;         // near-wake length [m]
    double sigma_y0 = 0.0;   // [m]
    double sigma_z0 = 0.0;   // [m]
    double k_y = 0.0;
    double k_z = 0.0;
    double theta = 0.0;      // initial deflection angle [rad]
};

struct Sigmas {
    double y = 0.0;
    double z = 0.0;
};

struct Expansion {
    double k_y = 0.0;
    double k_z = 0.0;
};

/// Wake cross-section at one downstream distance. Every quantity needed to
/// evaluate the deficit on a plane x = const.
struct WakeSection {
    double center = 0.0;     // delta_f
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    double amplitude = 0.0;  // centreline deficit fraction
    bool clamped = false;    // radicand of the amplitude clamped at zero

    double deficit(double y, double z) const;
};

struct DeficitSample {
    double value = 0.0;
    bool clamped = false;
};

namespace wake {

double near_wake_length(const OperatingPoint& op, double i_rotor, const WakeParams& p);
Expansion wake_expansion(double i_rotor, const WakeParams& p);
Sigmas initial_sigmas(const OperatingPoint& op);
Sigmas sigmas_at(double x, const OperatingPoint& op, double i_rotor, const WakeParams& p);
double initial_deflection_angle(const OperatingPoint& op);
double rotation_deflection(double x, const OperatingPoint& op, const WakeParams& p);
double total_deflection(double x, const OperatingPoint& op, double i_rotor, const WakeParams& p);

/// Fractional velocity deficit 1 - U/U_inf. Requires x > 0.
DeficitSample deficit(double x, double y, double z, const OperatingPoint& op, double i_rotor,
                      const WakeParams& p);

}  // namespace wake

/// One turbine's wake with its geometry resolved once, for repeated sampling.
class GaussianWake {
public:
    GaussianWake(const OperatingPoint& op, double i_rotor, const WakeParams& params);

    const WakeGeometry& geometry() const { return geom_; }
    const OperatingPoint& operating_point() const { return op_; }
    double i_rotor() const { return i_rotor_; }

    Sigmas sigmas(double x) const;
    double deflection(double x) const;
    WakeSection section(double x) const;

    DeficitSample deficit(double x, double y, double z) const;

private:
    OperatingPoint op_;
    double i_rotor_;
    WakeParams params_;
    WakeGeometry geom_;
    double c0_;
    double sqrt_ct_;
    double far_coeff_;       // theta/5.2 * (...) * sqrt(sy0 sz0 / (ky kz Ct))
};

}  // namespace wakesteer

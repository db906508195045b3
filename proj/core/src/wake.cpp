#include "wakesteer/wake.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wakesteer/error.hpp"

namespace wakesteer {
namespace {

constexpr double kDeflectionA = 1.6;

void require_ti(double i_rotor) {
    if (!(i_rotor > 0.0)) {
        throw DomainError("turbulence intensity must be positive, got " + std::to_string(i_rotor));
    }
}

}  // namespace

WakeParams WakeParams::from_array(std::span<const double> v) {
    if (v.size() != kSize) {
        throw DomainError("WakeParams needs 6 components");
    }
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

void WakeParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw DomainError("alpha and beta must be positive");
    }
    // k_a * I + k_b is linear in I, so checking both ends covers the interval.
    if (!(k_a * 0.001 + k_b > 0.0) || !(k_a * 0.5 + k_b > 0.0)) {
        throw DomainError("wake expansion k_a*I + k_b must be positive on I in [0.001, 0.5]");
    }
}

void OperatingPoint::validate() const {
    if (!(c_t > 0.0 && c_t < 1.0)) {
        throw DomainError("thrust coefficient must lie in (0,1), got " + std::to_string(c_t));
    }
    if (!(std::abs(gamma) < std::numbers::pi / 2)) {
        throw DomainError("yaw misalignment must satisfy |gamma| < pi/2");
    }
    if (!(diameter > 0.0)) {
        throw DomainError("rotor diameter must be positive");
    }
}

double WakeSection::deficit(double y, double z) const {
    const double dy = y - center;
    const double e = -(dy * dy) / (2.0 * sigma_y * sigma_y) - (z * z) / (2.0 * sigma_z * sigma_z);
    return amplitude * std::exp(e);
}

namespace wake {

double near_wake_length(const OperatingPoint& op, double i_rotor, const WakeParams& p) {
    op.validate();
    require_ti(i_rotor);
    const double root = std::sqrt(1.0 - op.c_t);
    return op.diameter * std::cos(op.gamma) * (1.0 + root) /
           (std::numbers::sqrt2 * (p.alpha * i_rotor + p.beta * (1.0 - root)));
}

Expansion wake_expansion(double i_rotor, const WakeParams& p) {
    const double k = p.k_a * i_rotor + p.k_b;
    if (!(k > 0.0)) {
        throw DomainError("wake expansion coefficient must be positive, got " + std::to_string(k));
    }
    return {k, k};
}

Sigmas initial_sigmas(const OperatingPoint& op) {
    const double s = op.diameter / (2.0 * std::numbers::sqrt2);
    return {s * std::cos(op.gamma), s};
}

Sigmas sigmas_at(double x, const OperatingPoint& op, double i_rotor, const WakeParams& p) {
    return GaussianWake(op, i_rotor, p).sigmas(x);
}

double initial_deflection_angle(const OperatingPoint& op) {
    const double cg = std::cos(op.gamma);
    const double r = 1.0 - op.c_t * cg;
    if (!(r > 0.0)) {
        throw DomainError("C_T cos(gamma) must be below 1 for the initial deflection angle");
    }
    return 0.3 * op.gamma / cg * (1.0 - std::sqrt(r));
}

double rotation_deflection(double x, const OperatingPoint& op, const WakeParams& p) {
    return p.a_d * op.diameter + p.b_d * x;
}

double total_deflection(double x, const OperatingPoint& op, double i_rotor, const WakeParams& p) {
    return GaussianWake(op, i_rotor, p).deflection(x);
}

DeficitSample deficit(double x, double y, double z, const OperatingPoint& op, double i_rotor,
                      const WakeParams& p) {
    return GaussianWake(op, i_rotor, p).deficit(x, y, z);
}

}  // namespace wake

GaussianWake::GaussianWake(const OperatingPoint& op, double i_rotor, const WakeParams& params)
    : op_(op), i_rotor_(i_rotor), params_(params) {
    op.validate();
    require_ti(i_rotor);

    const auto s0 = wake::initial_sigmas(op);
    const auto k = wake::wake_expansion(i_rotor, params);
    geom_.x0 = wake::near_wake_length(op, i_rotor, params);
    geom_.sigma_y0 = s0.y;
    geom_.sigma_z0 = s0.z;
    geom_.k_y = k.k_y;
    geom_.k_z = k.k_z;
    geom_.theta = wake::initial_deflection_angle(op);

    c0_ = 1.0 - std::sqrt(1.0 - op.c_t);
    sqrt_ct_ = std::sqrt(op.c_t);
    const double shape = c0_ * c0_ - 3.0 * std::exp(1.0 / 12.0) * c0_ + 3.0 * std::exp(1.0 / 3.0);
    far_coeff_ = geom_.theta / 5.2 * shape *
                 std::sqrt(geom_.sigma_y0 * geom_.sigma_z0 / (geom_.k_y * geom_.k_z * op.c_t));
}

Sigmas GaussianWake::sigmas(double x) const {
    if (x < 0.0) {
        throw DomainError("downstream distance must be non-negative");
    }
    if (x < geom_.x0) {
        return {geom_.sigma_y0, geom_.sigma_z0};
    }
    const double dx = x - geom_.x0;
    return {geom_.sigma_y0 + dx * geom_.k_y, geom_.sigma_z0 + dx * geom_.k_z};
}

double GaussianWake::deflection(double x) const {
    const double rot = wake::rotation_deflection(x, op_, params_);
    if (x < geom_.x0) {
        if (x < 0.0) {
            throw DomainError("downstream distance must be non-negative");
        }
        return rot + std::tan(geom_.theta) * x;
    }
    if (geom_.theta == 0.0) {
        return rot;
    }
    const auto s = sigmas(x);
    const double s_sigma = std::sqrt((s.y * s.z) / (geom_.sigma_y0 * geom_.sigma_z0));
    const double a = kDeflectionA;
    const double f1 = (a + sqrt_ct_);
    const double f2 = (a * s_sigma - sqrt_ct_);
    const double f3 = (a - sqrt_ct_);
    const double f4 = (a * s_sigma + sqrt_ct_);
    if (!(f2 > 0.0)) {
        throw DomainError("deflection log argument: (1.6 S_sigma - sqrt(C_T)) is not positive");
    }
    if (!(f3 > 0.0)) {
        throw DomainError("deflection log argument: (1.6 - sqrt(C_T)) is not positive");
    }
    return rot + std::tan(geom_.theta) * geom_.x0 + far_coeff_ * std::log((f1 * f2) / (f3 * f4));
}

WakeSection GaussianWake::section(double x) const {
    WakeSection out;
    const auto s = sigmas(x);
    out.sigma_y = s.y;
    out.sigma_z = s.z;
    out.center = deflection(x);
    double radicand = 1.0 - (geom_.sigma_y0 * geom_.sigma_z0) / (s.y * s.z) * op_.c_t;
    if (radicand <= 0.0) {
        radicand = 0.0;
        out.clamped = true;
    }
    out.amplitude = 1.0 - std::sqrt(radicand);
    return out;
}

DeficitSample GaussianWake::deficit(double x, double y, double z) const {
    if (!(x > 0.0)) {
        throw DomainError("deficit is only defined downstream of the rotor (x > 0)");
    }
    const auto sec = section(x);
    return {sec.deficit(y, z), sec.clamped};
}

}  // namespace wakesteer

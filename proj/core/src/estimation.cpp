#include "wakesteer/estimation.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "wakesteer/error.hpp"
#include "wakesteer/nelder_mead.hpp"

namespace wakesteer {

void MeasurementWindow::validate(std::size_t n) const {
    if (!(length_s > 0.0)) {
        throw DomainError("measurement window length must be positive");
    }
    if (power_w.size() != n || direction.size() != n) {
        throw DomainError("measurement window needs one entry per turbine");
    }
}

void MeasurementHistory::add(double t, std::vector<double> power_w, std::vector<double> direction) {
    if (!samples_.empty() && t < samples_.back().t) {
        throw DomainError("measurement history must be fed in time order");
    }
    samples_.push_back({t, std::move(power_w), std::move(direction)});
}

MeasurementWindow MeasurementHistory::window(double t_end, double length) const {
    MeasurementWindow w;
    w.length_s = length;
    std::size_t count = 0;
    std::vector<double> sin_sum, cos_sum;
    for (const auto& s : samples_) {
        if (s.t <= t_end - length || s.t > t_end) continue;
        if (count == 0) {
            w.power_w.assign(s.power_w.size(), 0.0);
            sin_sum.assign(s.direction.size(), 0.0);
            cos_sum.assign(s.direction.size(), 0.0);
        }
        for (std::size_t i = 0; i < s.power_w.size(); ++i) w.power_w[i] += s.power_w[i];
        for (std::size_t i = 0; i < s.direction.size(); ++i) {
            sin_sum[i] += std::sin(s.direction[i]);
            cos_sum[i] += std::cos(s.direction[i]);
        }
        ++count;
    }
    if (count == 0) {
        throw EstimationError("no measurements inside the averaging window");
    }
    for (auto& p : w.power_w) p /= static_cast<double>(count);
    w.direction.resize(sin_sum.size());
    for (std::size_t i = 0; i < sin_sum.size(); ++i) w.direction[i] = std::atan2(sin_sum[i], cos_sum[i]);
    return w;
}

void MeasurementHistory::prune(double t_keep_from) {
    while (!samples_.empty() && samples_.front().t < t_keep_from) samples_.pop_front();
}

double circular_mean(std::span<const double> angles) {
    double s = 0.0;
    double c = 0.0;
    for (double a : angles) {
        s += std::sin(a);
        c += std::cos(a);
    }
    return normalize_angle(std::atan2(s, c));
}

DirectionEstimate estimate_direction(std::span<const double> directions, double sigma_turbine) {
    if (directions.empty()) {
        throw DomainError("direction estimate needs at least one signal");
    }
    return {circular_mean(directions), sigma_turbine / std::sqrt(static_cast<double>(directions.size()))};
}

DirectionEstimate estimate_direction(const MeasurementWindow& window, double sigma_turbine) {
    return estimate_direction(window.direction, sigma_turbine);
}

double estimation_cost(double i_inf, double u_inf, double phi_hat, const MeasurementWindow& window,
                       std::span<const double> weights, const FarmScenario& farm, const WakeParams& params) {
    const std::size_t n = farm.size();
    window.validate(n);
    if (weights.size() != n) {
        throw DomainError("estimator weights need one entry per turbine");
    }
    FarmScenario sc = farm;
    sc.ambient = {phi_hat, i_inf, u_inf};
    FarmEvaluation ev;
    try {
        ev = evaluate_farm(sc, params);
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = window.power_w[i] - ev.turbines[i].power_w;
        num += weights[i] * r * r;
        den += weights[i];
    }
    return std::sqrt(num / den);
}

AmbientEstimate estimate_ambient(const MeasurementWindow& window, std::span<const double> weights,
                                 const EstimationBounds& bounds, const FarmScenario& farm,
                                 const WakeParams& params, const EstimationOptions& options) {
    if (!(bounds.ti_lower < bounds.ti_upper) || !(bounds.u_lower < bounds.u_upper)) {
        throw DomainError("estimation bounds are degenerate");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw DomainError("estimator weights must be positive");
    }
    const auto dir = estimate_direction(window, options.sigma_turbine);

    AmbientEstimate out;
    auto cost = [&](double ti, double u) {
        ++out.evaluations;
        return estimation_cost(ti, u, dir.phi_hat, window, weights, farm, params);
    };

    double best = std::numeric_limits<double>::infinity();
    double best_ti = 0.0;
    double best_u = 0.0;
    for (int a = 0; a < options.grid_ti; ++a) {
        const double ti = bounds.ti_lower + (a + 0.5) * (bounds.ti_upper - bounds.ti_lower) / options.grid_ti;
        for (int b = 0; b < options.grid_u; ++b) {
            const double u = bounds.u_lower + (b + 0.5) * (bounds.u_upper - bounds.u_lower) / options.grid_u;
            const double c = cost(ti, u);
            if (c < best) {
                best = c;
                best_ti = ti;
                best_u = u;
            }
        }
    }
    if (!std::isfinite(best)) {
        throw EstimationError("estimation failed: every grid cell is infeasible");
    }

    const Box box{{bounds.ti_lower, bounds.u_lower}, {bounds.ti_upper, bounds.u_upper}};
    NelderMeadOptions nm;
    nm.max_evaluations = options.simplex_evaluations;
    nm.initial_step = 0.5 / std::max(options.grid_ti, options.grid_u);
    nm.f_tolerance = 1e-9;
    nm.x_tolerance = 1e-7;
    const std::vector<double> start{best_ti, best_u};
    const auto local = nelder_mead([&](std::span<const double> x) { return cost(x[0], x[1]); }, box, start, nm);
    if (local.best_cost < best) {
        best = local.best_cost;
        best_ti = local.best[0];
        best_u = local.best[1];
    }
    out.xi = {dir.phi_hat, best_ti, best_u};
    out.sigma_phi = dir.sigma_phi;
    out.cost = best;
    return out;
}

}  // namespace wakesteer

#include "wakesteer/yaw_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "wakesteer/error.hpp"

namespace wakesteer {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Grid k*step for every integer k with k*step inside [lo, hi].
std::vector<double> grid_values(double lo, double hi, double step) {
    std::vector<double> v;
    const auto k0 = static_cast<long>(std::ceil(lo / step - 1e-9));
    const auto k1 = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long k = k0; k <= k1; ++k) {
        v.push_back(std::clamp(static_cast<double>(k) * step, lo, hi));
    }
    return v;
}

struct Search {
    const DirectionDistribution& dist;
    const AmbientConditions& xi;
    const FarmScenario& farm;
    const WakeParams& params;
    const YawBounds& bounds;
    const YawOptions& opt;
    std::vector<std::size_t> order;
    std::size_t budget;

    struct Outcome {
        std::vector<double> gamma;
        std::vector<double> thrust;
        double value = kNegInf;
        std::size_t sweeps = 0;
        std::size_t evaluations = 0;
        bool exhausted = false;
        std::vector<double> trace;
    };

    double eval(Outcome& o, const std::vector<double>& gamma, const std::vector<double>& thrust) const {
        ++o.evaluations;
        FarmScenario sc = farm;
        sc.controls.thrust_scale = thrust;
        return robust_objective(gamma, dist, xi, sc, params);
    }

    // Line search of one coordinate: best of the coarse grid, then of the
    // fine grid within one coarse step of it. Only strict improvements move.
    void line_search(Outcome& o, std::vector<double>& x, std::size_t i, double lo, double hi, double coarse,
                     double fine, bool yaw) const {
        auto value_with = [&](double v) {
            auto g = o.gamma;
            auto t = o.thrust;
            (yaw ? g : t)[i] = v;
            return eval(o, g, t);
        };
        double best_v = x[i];
        double best = o.value;
        for (double v : grid_values(lo, hi, coarse)) {
            if (o.evaluations >= budget) {
                o.exhausted = true;
                break;
            }
            if (v == x[i]) continue;
            const double f = value_with(v);
            if (f > best) {
                best = f;
                best_v = v;
            }
        }
        const double centre = best_v;
        const double flo = std::max(lo, centre - coarse);
        const double fhi = std::min(hi, centre + coarse);
        for (double v : grid_values(flo, fhi, fine)) {
            if (o.evaluations >= budget) {
                o.exhausted = true;
                break;
            }
            if (v == best_v || v == x[i]) continue;
            const double f = value_with(v);
            if (f > best) {
                best = f;
                best_v = v;
            }
        }
        if (best > o.value) {
            x[i] = best_v;
            o.value = best;
        }
    }

    Outcome run(std::vector<double> gamma0) const {
        Outcome o;
        o.gamma = std::move(gamma0);
        o.thrust = farm.controls.thrust_scale;
        o.value = eval(o, o.gamma, o.thrust);
        o.trace.push_back(o.value);
        for (int sweep = 0; sweep < opt.max_sweeps && !o.exhausted; ++sweep) {
            const auto before_g = o.gamma;
            const auto before_t = o.thrust;
            for (std::size_t i : order) {
                line_search(o, o.gamma, i, bounds.lower[i], bounds.upper[i], opt.coarse_step, opt.fine_step, true);
                if (opt.optimize_thrust) {
                    line_search(o, o.thrust, i, opt.thrust_lower, 1.0, 0.05, 0.01, false);
                }
                if (o.exhausted) break;
            }
            ++o.sweeps;
            o.trace.push_back(o.value);
            if (o.gamma == before_g && o.thrust == before_t) break;
        }
        return o;
    }
};

}  // namespace

YawBounds YawBounds::uniform(std::size_t n, double lower, double upper) {
    return {std::vector<double>(n, lower), std::vector<double>(n, upper)};
}

void YawBounds::validate(std::size_t n) const {
    if (lower.size() != n || upper.size() != n) {
        throw DomainError("yaw bounds need one entry per turbine");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= 0.0 && 0.0 <= upper[i])) {
            throw DomainError("yaw bounds must contain zero (greedy operation)");
        }
    }
}

double robust_objective(std::span<const double> gamma, const DirectionDistribution& dist,
                        const AmbientConditions& xi, const FarmScenario& farm, const WakeParams& params) {
    if (gamma.size() != farm.size()) {
        throw DomainError("yaw vector length does not match the farm");
    }
    FarmScenario sc = farm;
    sc.controls.yaw.assign(gamma.begin(), gamma.end());
    double total = 0.0;
    try {
        for (const auto& node : dist.nodes) {
            sc.ambient = {normalize_angle(node.phi), xi.i_inf, xi.u_inf};
            total += node.weight * evaluate_farm(sc, params).farm_power_w;
        }
    } catch (const DomainError&) {
        return kNegInf;
    }
    return total;
}

double robust_objective(std::span<const double> gamma, const AmbientConditions& xi, double sigma_phi,
                        const FarmScenario& farm, const WakeParams& params, int nodes) {
    return robust_objective(gamma, gauss_hermite_nodes(xi.phi, sigma_phi, nodes), xi, farm, params);
}

YawResult optimize_yaw(const AmbientConditions& xi, double sigma_phi, const YawBounds& bounds,
                       const FarmScenario& farm, const WakeParams& params, const YawOptions& options) {
    const std::size_t n = farm.size();
    bounds.validate(n);
    xi.validate();
    const auto dist = gauss_hermite_nodes(xi.phi, sigma_phi, options.quadrature_nodes);

    const int starts = 1 + std::max(0, options.restarts);
    Search search{dist, xi, farm, params, bounds, options,
                  sort_upstream(rotate_to_wind_frame(farm.layout, xi.phi)),
                  std::max<std::size_t>(1, options.max_evaluations / static_cast<std::size_t>(starts))};

    std::vector<std::vector<double>> initial(static_cast<std::size_t>(starts), std::vector<double>(n, 0.0));
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 1; s < starts; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            initial[static_cast<std::size_t>(s)][i] = bounds.lower[i] + unit(rng) * (bounds.upper[i] - bounds.lower[i]);
        }
    }

    std::vector<Search::Outcome> outcomes(static_cast<std::size_t>(starts));
    const unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1) {
        for (int s = 0; s < starts; ++s) outcomes[static_cast<std::size_t>(s)] = search.run(initial[static_cast<std::size_t>(s)]);
    } else {
        std::vector<std::jthread> pool;
        for (int s = 0; s < starts; ++s) {
            pool.emplace_back([&, s] { outcomes[static_cast<std::size_t>(s)] = search.run(initial[static_cast<std::size_t>(s)]); });
        }
    }

    YawResult res;
    std::size_t win = 0;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        res.evaluations += outcomes[s].evaluations;
        res.budget_exhausted = res.budget_exhausted || outcomes[s].exhausted;
        if (outcomes[s].value > outcomes[win].value) win = s;  // ties keep the lower start index
    }
    const auto& best = outcomes[win];
    res.gamma = best.gamma;
    res.thrust_scale = best.thrust;
    res.objective = best.value;
    res.greedy_objective = outcomes[0].trace.front();
    res.iterations = best.sweeps;
    res.winning_start = static_cast<int>(win);
    res.trace = best.trace;
    return res;
}

}  // namespace wakesteer

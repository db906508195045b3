#include "wakesteer/differential_evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace wakesteer {

void Box::validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
        throw std::invalid_argument("box bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i])) {
            throw std::invalid_argument("box lower bound must be below upper bound");
        }
    }
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
}

std::vector<double> evaluate_batch(const Objective& f, const std::vector<std::vector<double>>& xs,
                                   unsigned threads) {
    std::vector<double> out(xs.size());
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(xs.size())));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < xs.size(); i = next++) {
            out[i] = f(xs[i]);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    return out;
}

namespace {

double nan_to_inf(double c) {
    return std::isnan(c) ? std::numeric_limits<double>::infinity() : c;
}

}  // namespace

DeResult differential_evolution(const Objective& f, const Box& box, const DeOptions& opt) {
    box.validate();
    const std::size_t dim = box.dim();
    std::size_t np = opt.population;
    if (np == 0) {
        np = static_cast<std::size_t>(std::ceil(opt.population_factor * static_cast<double>(dim)));
    }
    np = std::max<std::size_t>(np, 4);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    DeResult res;
    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    for (auto& x : pop) {
        for (std::size_t j = 0; j < dim; ++j) {
            x[j] = box.lower[j] + unit(rng) * (box.upper[j] - box.lower[j]);
        }
    }
    const std::size_t init_count = std::min(np, opt.max_evaluations);
    pop.resize(std::max<std::size_t>(init_count, 1));
    if (init_count < 4) {
        auto costs = evaluate_batch(f, pop, opt.threads);
        const auto it = std::min_element(costs.begin(), costs.end());
        res.best = pop[static_cast<std::size_t>(it - costs.begin())];
        res.best_cost = nan_to_inf(*it);
        res.evaluations = pop.size();
        res.trace.push_back(res.best_cost);
        return res;
    }
    np = init_count;
    auto cost = evaluate_batch(f, pop, opt.threads);
    for (auto& c : cost) c = nan_to_inf(c);
    res.evaluations = np;

    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    };
    res.trace.push_back(cost[best_index()]);

    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
    std::vector<std::vector<double>> trial(np, std::vector<double>(dim));

    while (res.evaluations + np <= opt.max_evaluations) {
        const auto [lo, hi] = std::minmax_element(cost.begin(), cost.end());
        if (std::isfinite(*hi) && *hi - *lo <= opt.tolerance) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1, r2, r3;
            do { r1 = pick(rng); } while (r1 == i);
            do { r2 = pick(rng); } while (r2 == i || r2 == r1);
            do { r3 = pick(rng); } while (r3 == i || r3 == r1 || r3 == r2);
            const std::size_t jrand = pick_dim(rng);
            for (std::size_t j = 0; j < dim; ++j) {
                const double u = unit(rng);
                double v = pop[i][j];
                if (u < opt.crossover || j == jrand) {
                    v = pop[r1][j] + opt.differential_weight * (pop[r2][j] - pop[r3][j]);
                    // Out-of-box components land halfway between the base vector and the bound.
                    if (v < box.lower[j]) v = 0.5 * (pop[r1][j] + box.lower[j]);
                    if (v > box.upper[j]) v = 0.5 * (pop[r1][j] + box.upper[j]);
                }
                trial[i][j] = v;
            }
        }
        auto trial_cost = evaluate_batch(f, trial, opt.threads);
        res.evaluations += np;
        for (std::size_t i = 0; i < np; ++i) {
            const double c = nan_to_inf(trial_cost[i]);
            if (c <= cost[i]) {
                pop[i] = trial[i];
                cost[i] = c;
            }
        }
        ++res.generations;
        res.trace.push_back(cost[best_index()]);
    }
    if (!res.converged) {
        const auto [lo, hi] = std::minmax_element(cost.begin(), cost.end());
        res.converged = std::isfinite(*hi) && *hi - *lo <= opt.tolerance;
    }
    const std::size_t b = best_index();
    res.best = pop[b];
    res.best_cost = cost[b];
    return res;
}

}  // namespace wakesteer

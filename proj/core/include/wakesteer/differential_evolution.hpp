#pragma once

// Seeded DE/rand/1/bin over a box. Candidate generation is serial and
// evaluation of a generation may run on several threads; results are reduced
// by candidate index, so the outcome does not depend on the thread count.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wakesteer {

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    void validate() const;
    bool contains(std::span<const double> x) const;
};

using Objective = std::function<double(std::span<const double>)>;

struct DeOptions {
    std::size_t population = 0;        // 0: population_factor * dim
    double population_factor = 15.0;
    double crossover = 0.9;
    double differential_weight = 0.7;
    std::size_t max_evaluations = 5000;
    double tolerance = 1e-12;          // converged once max-min population cost <= tolerance
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct DeResult {
    std::vector<double> best;
    double best_cost = 0.0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> trace;         // best cost after initialisation and each generation
};

DeResult differential_evolution(const Objective& f, const Box& box, const DeOptions& opt);

/// Evaluate f at every point, possibly in parallel, storing results by index.
std::vector<double> evaluate_batch(const Objective& f, const std::vector<std::vector<double>>& xs,
                                   unsigned threads);

}  // namespace wakesteer

#pragma once

// Farm-wide yaw set-point optimisation against the surrogate, either for a
// single wind direction or for the expectation over a discretised normal
// direction distribution.

#include <cstdint>
#include <span>
#include <vector>

#include "wakesteer/farm.hpp"
#include "wakesteer/quadrature.hpp"

namespace wakesteer {

struct YawBounds {
    std::vector<double> lower;  // [rad]
    std::vector<double> upper;  // [rad]

    static YawBounds uniform(std::size_t n, double lower, double upper);
    /// Requires lower <= 0 <= upper per turbine so that greedy operation is feasible.
    void validate(std::size_t n) const;
};

/// Expected farm power sum_k rho_k P(phi_k, I, U, gamma) over `dist`.
/// Returns -inf when the model rejects any node.
double robust_objective(std::span<const double> gamma, const DirectionDistribution& dist,
                        const AmbientConditions& xi, const FarmScenario& farm, const WakeParams& params);

/// Convenience overload building the Gauss-Hermite nodes from (xi.phi, sigma_phi).
double robust_objective(std::span<const double> gamma, const AmbientConditions& xi, double sigma_phi,
                        const FarmScenario& farm, const WakeParams& params, int nodes = 5);

struct YawOptions {
    std::uint64_t seed = 1;
    int restarts = 4;                         // random starts in addition to the greedy start
    double coarse_step = 0.017453292519943295;  // 1 degree
    double fine_step = 0.0017453292519943296;   // 0.1 degree
    int max_sweeps = 30;
    std::size_t max_evaluations = 400000;     // objective calls, shared evenly by the starts
    int quadrature_nodes = 5;
    bool optimize_thrust = false;
    double thrust_lower = 0.7;
    unsigned threads = 0;                     // 0 = hardware concurrency
};

struct YawResult {
    std::vector<double> gamma;                // [rad]
    std::vector<double> thrust_scale;
    double objective = 0.0;                   // [W]
    double greedy_objective = 0.0;            // [W]
    std::size_t iterations = 0;               // sweeps of the winning start
    std::size_t evaluations = 0;              // objective calls over all starts
    int winning_start = 0;                    // 0 = greedy start
    bool budget_exhausted = false;
    std::vector<double> trace;                // best objective after each sweep of the winning start
};

/// Multi-start coordinate descent. Turbines are swept in upstream order; each
/// yaw is line-searched on the coarse grid and refined on the fine grid,
/// repeated until a sweep changes nothing. The greedy vector is always one of
/// the starts, so the result never falls below the greedy objective.
YawResult optimize_yaw(const AmbientConditions& xi, double sigma_phi, const YawBounds& bounds,
                       const FarmScenario& farm, const WakeParams& params, const YawOptions& options = {});

}  // namespace wakesteer

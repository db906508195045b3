#pragma once

// Offline fit of the wake parameters to sliced flow measurements.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wakesteer/farm.hpp"

namespace wakesteer {

struct ParamBounds {
    WakeParams lower;
    WakeParams upper;

    /// The bounds of the high-fidelity calibration study.
    static ParamBounds reference();
    bool contains(const WakeParams& p) const;
    WakeParams clamp(const WakeParams& p) const;
    void validate() const;
};

/// Rectangular sampling grid on a cross-stream plane, in rotor diameters,
/// centred on the wake-source hub.
struct SliceGrid {
    int ny = 21;
    int nz = 11;
    double half_width = 1.5;   // crosswind half-extent [D]
    double half_height = 0.6;  // vertical half-extent [D]
};

struct CalibrationCase {
    std::string id;
    FarmScenario scenario;
    std::vector<WorldPoint> points;
    std::vector<double> measured;  // [m/s], one per point

    void validate() const;
};

/// Flow points on slices at `distances` (in diameters) behind turbine
/// `source`, expressed in world coordinates. Measurements are filled by the
/// current scenario's model speeds at `params` (the caller overwrites them
/// with real data when it has some).
CalibrationCase extract_slices(const FarmScenario& scenario, const WakeParams& params,
                               std::span<const double> distances, const SliceGrid& grid,
                               std::size_t source = 0, std::string id = "case");

struct CostResult {
    double cost = 0.0;
    bool feasible = true;
    std::string diagnostic;
};

/// Root-mean-square speed error over every point of every case.
CostResult calibration_cost(const WakeParams& psi, std::span<const CalibrationCase> cases);

struct CalibrationConfig {
    std::size_t max_evaluations = 5000;
    std::uint64_t seed = 1;
    double population_factor = 15.0;
    double crossover = 0.9;
    double differential_weight = 0.7;
    double tolerance = 1e-10;      // stop when the population cost spread falls below
    bool polish = true;            // bounded simplex polish of the DE winner
    double polish_share = 0.2;     // fraction of the budget reserved for polishing
    unsigned threads = 0;          // 0 = hardware concurrency
};

struct CalibrationResult {
    WakeParams psi;
    double cost = 0.0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    std::vector<double> trace;     // best cost after each generation
};

CalibrationResult calibrate(std::span<const CalibrationCase> cases, const ParamBounds& bounds,
                            const CalibrationConfig& config);

/// Single-turbine calibration set mirroring the high-fidelity study: a yaw
/// sweep from -30 to 30 degrees and a derating sweep, each at every ambient
/// turbulence intensity in `ti_levels`, sliced at `distances`. Speeds come
/// from the model at `truth`, plus Gaussian noise of `noise_sigma` m/s.
std::vector<CalibrationCase> synthesize_calibration_set(const FarmScenario& single_turbine,
                                                        const WakeParams& truth,
                                                        std::span<const double> ti_levels,
                                                        std::span<const double> distances,
                                                        const SliceGrid& grid, double noise_sigma,
                                                        std::uint64_t seed);

}  // namespace wakesteer

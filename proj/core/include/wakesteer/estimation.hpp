#pragma once

// Online ambient-condition estimation. The wind direction comes first from
// the turbines' own direction signals; turbulence intensity and free-stream
// speed are then fitted to the windowed powers with the direction held fixed.

#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "wakesteer/farm.hpp"

namespace wakesteer {

struct MeasurementWindow {
    std::vector<double> power_w;    // per-turbine mean power
    std::vector<double> direction;  // per-turbine mean direction signal [rad]
    double length_s = 300.0;

    void validate(std::size_t n_turbines) const;
};

/// Rolling record of per-step turbine measurements, reduced to a
/// MeasurementWindow over any trailing interval.
class MeasurementHistory {
public:
    void add(double t, std::vector<double> power_w, std::vector<double> direction);
    /// Samples with t in (t_end - length, t_end]. Throws if there are none.
    MeasurementWindow window(double t_end, double length) const;
    /// Drop samples older than `t_keep_from`.
    void prune(double t_keep_from);
    std::size_t size() const { return samples_.size(); }

private:
    struct Sample {
        double t;
        std::vector<double> power_w;
        std::vector<double> direction;
    };
    std::deque<Sample> samples_;
};

struct DirectionEstimate {
    double phi_hat = 0.0;    // [rad]
    double sigma_phi = 0.0;  // [rad]
};

double circular_mean(std::span<const double> angles);

/// Circular mean of the per-turbine signals; the farm-wide spread shrinks
/// with the square root of the number of independent signals.
DirectionEstimate estimate_direction(std::span<const double> directions, double sigma_turbine);
DirectionEstimate estimate_direction(const MeasurementWindow& window, double sigma_turbine);

/// sqrt(sum w_i (P_meas,i - P_model,i)^2 / sum w_i). +inf when the model rejects the inputs.
double estimation_cost(double i_inf, double u_inf, double phi_hat, const MeasurementWindow& window,
                       std::span<const double> weights, const FarmScenario& farm, const WakeParams& params);

struct EstimationBounds {
    double ti_lower = 0.01;
    double ti_upper = 0.25;
    double u_lower = 3.0;
    double u_upper = 15.0;
};

struct EstimationOptions {
    int grid_ti = 12;
    int grid_u = 12;
    std::size_t simplex_evaluations = 400;
    double sigma_turbine = 0.10471975511965977;  // 6 degrees
};

struct AmbientEstimate {
    AmbientConditions xi;
    double sigma_phi = 0.0;
    double cost = 0.0;
    std::size_t evaluations = 0;
};

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid search over (I, U) followed by a bounded simplex from the best cell.
/// `farm` supplies layout, turbine and the controls active during the window;
/// its ambient field is ignored. Throws EstimationError if every grid cell is infeasible.
AmbientEstimate estimate_ambient(const MeasurementWindow& window, std::span<const double> weights,
                                 const EstimationBounds& bounds, const FarmScenario& farm,
                                 const WakeParams& params, const EstimationOptions& options = {});

}  // namespace wakesteer

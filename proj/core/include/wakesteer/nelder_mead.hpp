#pragma once

#include <span>
#include <vector>

#include "wakesteer/differential_evolution.hpp"

namespace wakesteer {

struct NelderMeadOptions {
    double initial_step = 0.05;    // fraction of each box side
    std::size_t max_evaluations = 500;
    double f_tolerance = 1e-12;    // absolute spread of simplex values
    double x_tolerance = 1e-9;     // simplex diameter in box-normalised units
};

struct NelderMeadResult {
    std::vector<double> best;
    double best_cost = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex restricted to a box by projecting every vertex onto it.
/// Works in box-normalised coordinates so sides of very different scale are
/// treated alike.
NelderMeadResult nelder_mead(const Objective& f, const Box& box, std::span<const double> start,
                             const NelderMeadOptions& opt = {});

}  // namespace wakesteer

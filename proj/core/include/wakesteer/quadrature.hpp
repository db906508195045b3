#pragma once

#include <vector>

namespace wakesteer {

struct DirectionNode {
    double phi = 0.0;     // [rad]
    double weight = 0.0;  // probability mass, sums to one over the nodes
};

/// Normal wind-direction distribution discretised by Gauss-Hermite quadrature.
struct DirectionDistribution {
    double mean = 0.0;
    double sigma = 0.0;
    std::vector<DirectionNode> nodes;
};

struct HermiteRule {
    std::vector<double> roots;    // physicists' Hermite roots, ascending
    std::vector<double> weights;  // raw weights, sum sqrt(pi)
};

/// n-point Gauss-Hermite rule for the weight exp(-t^2).
HermiteRule gauss_hermite_rule(int n);

/// Nodes mean + sqrt(2) sigma t_k with weights w_k / sqrt(pi). sigma == 0
/// collapses to a single node of weight one.
DirectionDistribution gauss_hermite_nodes(double phi_mean, double sigma, int n = 5);

}  // namespace wakesteer

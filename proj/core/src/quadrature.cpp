#include "wakesteer/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wakesteer {

HermiteRule gauss_hermite_rule(int n) {
    if (n < 1) {
        throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
    }
    // Newton iteration on the orthonormal Hermite recurrence, roots found
    // from the largest downward using the usual asymptotic initial guesses.
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const std::size_t m = static_cast<std::size_t>((n + 1) / 2);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        x[i] = z;
        x[static_cast<std::size_t>(n) - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(n) - 1 - i] = w[i];
    }
    if (n % 2 == 1) {
        x[m - 1] = 0.0;  // exact centre node
    }
    HermiteRule rule;
    rule.roots.assign(x.rbegin(), x.rend());
    rule.weights.assign(w.rbegin(), w.rend());
    return rule;
}

DirectionDistribution gauss_hermite_nodes(double phi_mean, double sigma, int n) {
    if (sigma < 0.0) {
        throw std::invalid_argument("direction spread must be non-negative");
    }
    DirectionDistribution d;
    d.mean = phi_mean;
    d.sigma = sigma;
    if (sigma == 0.0 || n == 1) {
        d.nodes.push_back({phi_mean, 1.0});
        return d;
    }
    const auto rule = gauss_hermite_rule(n);
    double total = 0.0;
    for (double wk : rule.weights) total += wk;
    for (std::size_t k = 0; k < rule.roots.size(); ++k) {
        d.nodes.push_back({phi_mean + std::numbers::sqrt2 * sigma * rule.roots[k], rule.weights[k] / total});
    }
    return d;
}

}  // namespace wakesteer

#include "wakesteer/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wakesteer {

NelderMeadResult nelder_mead(const Objective& f, const Box& box, std::span<const double> start,
                             const NelderMeadOptions& opt) {
    box.validate();
    const std::size_t n = box.dim();
    if (start.size() != n) {
        throw std::invalid_argument("nelder_mead: start point has wrong dimension");
    }

    auto to_box = [&](const std::vector<double>& u) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = box.lower[j] + std::clamp(u[j], 0.0, 1.0) * (box.upper[j] - box.lower[j]);
        }
        return x;
    };
    auto project = [](std::vector<double>& u) {
        for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
    };

    NelderMeadResult res;
    // The budget is a hard cap: calls past it score +inf without evaluating f.
    auto eval = [&](std::vector<double>& u) {
        project(u);
        if (res.evaluations >= opt.max_evaluations) return std::numeric_limits<double>::infinity();
        ++res.evaluations;
        const double c = f(to_box(u));
        return std::isnan(c) ? std::numeric_limits<double>::infinity() : c;
    };

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        simplex[0][j] = (start[j] - box.lower[j]) / (box.upper[j] - box.lower[j]);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        simplex[i] = simplex[0];
        auto& v = simplex[i][i - 1];
        // Step inward when the start sits on the upper face.
        v += (v + opt.initial_step <= 1.0) ? opt.initial_step : -opt.initial_step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> idx(n + 1);
    while (res.evaluations < opt.max_evaluations) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front();
        const std::size_t worst = idx.back();
        const std::size_t second = idx[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(simplex[i][j] - simplex[best][j]));
            diam = std::max(diam, d);
        }
        if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= opt.f_tolerance && diam <= opt.x_tolerance) {
            res.converged = true;
            break;
        }
        if (diam <= opt.x_tolerance * 1e-3) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            fv[i] = eval(simplex[i]);
        }
    }
    const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.best = to_box(simplex[b]);
    res.best_cost = fv[b];
    return res;
}

}  // namespace wakesteer

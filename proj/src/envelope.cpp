#include "qhedge/envelope.hpp"

#include "qhedge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhedge {

TabulatedFunction TabulatedFunction::from_values(std::vector<double> grid, std::vector<double> values) {
    TabulatedFunction f;
    f.grid = std::move(grid);
    f.values = std::move(values);
    f.log_deficit.resize(f.values.size());
    if (!f.values.empty()) {
        const double top = *std::max_element(f.values.begin(), f.values.end());
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            const double gap = top - f.values[i];
            f.log_deficit[i] = gap > 0.0 ? std::log(gap) : -std::numeric_limits<double>::infinity();
        }
    }
    return f;
}

void TabulatedFunction::validate() const {
    if (grid.empty()) throw std::invalid_argument("TabulatedFunction: empty curve");
    if (values.size() != grid.size() || log_deficit.size() != grid.size()) {
        throw std::invalid_argument("TabulatedFunction: grid, values and log_deficit differ in length");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(values[i])) {
            throw std::invalid_argument("TabulatedFunction: non-finite entry");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("TabulatedFunction: grid must be strictly ascending");
        }
    }
}

std::size_t argmax_objective(std::span<const double> x, std::span<const double> g,
                             std::span<const double> log_deficit, double m) {
    std::size_t best = 0;
    double best_obj = g[0] - m * x[0];
    const bool flat = (m == 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double obj = g[i] - m * x[i];
        if (obj > best_obj || (flat && obj == best_obj && log_deficit[i] < log_deficit[best])) {
            best = i;
            best_obj = obj;
        }
    }
    return best;
}

TangentResult tangent_point(const TabulatedFunction& curve, double m) {
    curve.validate();
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("tangent_point: slope must be finite and >= 0");
    const std::size_t best = argmax_objective(curve.grid, curve.values, curve.log_deficit, m);
    return {best, curve.grid[best], curve.values[best], curve.values[best] - m * curve.grid[best]};
}

std::vector<TangentResult> batch_tangent(std::span<const TabulatedFunction> curves, double m, unsigned threads) {
    if (!curves.empty()) {
        const auto& grid = curves.front().grid;
        for (const auto& c : curves) {
            if (c.grid != grid) throw std::invalid_argument("batch_tangent: curves must share one grid");
        }
    }
    std::vector<TangentResult> out(curves.size());
    parallel_for(curves.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = tangent_point(curves[i], m);
    });
    return out;
}

std::vector<std::size_t> upper_hull_indices(const TabulatedFunction& curve) {
    curve.validate();
    std::vector<std::size_t> hull;
    hull.reserve(curve.size());
    const auto& x = curve.grid;
    const auto& g = curve.values;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        // Drop the middle point unless it lies strictly above the chord.
        while (hull.size() >= 2) {
            const std::size_t o = hull[hull.size() - 2];
            const std::size_t a = hull.back();
            const double cross = (x[a] - x[o]) * (g[i] - g[o]) - (g[a] - g[o]) * (x[i] - x[o]);
            if (cross < 0.0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    return hull;
}

TabulatedFunction upper_hull(const TabulatedFunction& curve) {
    const auto hull = upper_hull_indices(curve);
    TabulatedFunction out;
    out.grid.reserve(hull.size());
    out.values.reserve(hull.size());
    out.log_deficit.reserve(hull.size());
    for (std::size_t i : hull) {
        out.grid.push_back(curve.grid[i]);
        out.values.push_back(curve.values[i]);
        out.log_deficit.push_back(curve.log_deficit[i]);
    }
    return out;
}

}  // namespace qhedge

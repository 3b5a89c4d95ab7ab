#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qhedge {

/// A nondecreasing function sampled on an ascending grid.
///
/// `log_deficit[i]` is log(sup g - g(x_i)), the distance below the supremum kept in
/// log form. It is only consulted to separate points whose values are equal in
/// double precision at slope zero; curves built from plain values derive it.
struct TabulatedFunction {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> log_deficit;

    std::size_t size() const { return grid.size(); }

    /// Builds a function from values only; the deficit is taken against max(values).
    static TabulatedFunction from_values(std::vector<double> grid, std::vector<double> values);

    /// Throws std::invalid_argument unless non-empty, equally sized, finite and ascending.
    void validate() const;
};

struct TangentResult {
    std::size_t index = 0;  ///< position of pi in the input grid
    double pi = 0.0;
    double g_at_pi = 0.0;
    double objective = 0.0;  ///< g(pi) - m * pi
};

/// Index of the smallest maximizer of g_i - m x_i. At m = 0, entries tied in double
/// precision are ordered by log_deficit before position.
std::size_t argmax_objective(std::span<const double> x, std::span<const double> g,
                             std::span<const double> log_deficit, double m);

/// Smallest grid point where the highest slope-m line lying above g touches g,
/// i.e. the smallest maximizer of g(x) - m x over the grid.
TangentResult tangent_point(const TabulatedFunction& curve, double m);

/// Elementwise tangent_point. All curves must share one grid.
std::vector<TangentResult> batch_tangent(std::span<const TabulatedFunction> curves, double m, unsigned threads = 1);

/// Vertices of the upper concave hull of the curve's points, in grid order.
/// tangent_point on the result selects the same grid point as on the full curve for
/// every m >= 0; a sweep over many slopes only needs to keep these.
TabulatedFunction upper_hull(const TabulatedFunction& curve);

/// Positions of the upper hull vertices in the input grid.
std::vector<std::size_t> upper_hull_indices(const TabulatedFunction& curve);

}  // namespace qhedge

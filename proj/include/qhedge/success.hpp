#pragma once

#include "qhedge/envelope.hpp"
#include "qhedge/market.hpp"

#include <string_view>

namespace qhedge {

/// How well terminal wealth v covers the claim d.
///   Indicator: 1{v >= d}
///   Ratio:     1{v >= d} + 1{v < d} v / d
enum class SuccessFactor { Indicator, Ratio };

double success_factor(SuccessFactor factor, double v, double d);

std::string_view to_string(SuccessFactor factor);
SuccessFactor parse_success_factor(std::string_view name);

/// G_Q(x) for a fixed terminal sample, tabulated on a capital grid.
using ConditionalSuccessCurve = TabulatedFunction;

/// Conditional expected success factor given W^X_T = w, without the density weight,
/// together with log(1 - success). The put payoff is bounded by K, so x ranges over [0, K].
struct ConditionalSuccess {
    double success = 0.0;
    double log_shortfall = 0.0;
};

ConditionalSuccess conditional_success(const MarketParams& params, TerminalSample w, double x, SuccessFactor factor);

/// density_p_over_q(w) * P(Y_T >= K - x | W^X_T = w).
double g_indicator(const MarketParams& params, TerminalSample w, double x);

/// density_p_over_q(w) * E[ratio factor | W^X_T = w], by composite Gauss-Legendre quadrature.
double g_ratio(const MarketParams& params, TerminalSample w, double x);

/// Curve on the uniform grid {i K / n_x : i = 0..n_x}.
ConditionalSuccessCurve tabulate_g(const MarketParams& params, TerminalSample w, SuccessFactor factor,
                                   std::size_t n_x);

/// tabulate_g plus the density-free conditional success at every grid point.
struct TabulatedSuccess {
    ConditionalSuccessCurve curve;
    std::vector<double> success;
};

TabulatedSuccess tabulate_success(const MarketParams& params, TerminalSample w, SuccessFactor factor,
                                  std::size_t n_x);

}  // namespace qhedge

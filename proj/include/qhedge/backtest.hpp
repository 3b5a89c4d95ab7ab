#pragma once

#include "qhedge/market.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qhedge {

/// The optimal claim pi as a function of the terminal Brownian value w = W^X_T:
/// linear between knots, flat beyond the outer knots, values in [0, K].
class PayoffFunction {
public:
    PayoffFunction() = default;
    PayoffFunction(std::vector<double> knots, std::vector<double> values, double strike_k);

    double operator()(double w) const;

    /// E[f(center + sd Z)] for standard normal Z, exact for the piecewise-linear form.
    double gaussian_expectation(double center, double sd) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
    // f(w) = values_[0] + sum_j kink_[j] (w - knots_[j])^+, with prefix sums for the far-left knots.
    std::vector<double> kink_;
    std::vector<double> kink_sum_;
    std::vector<double> kink_moment_;
};

/// Claim through the per-sample (w_i, x^max(i)) pairs. Samples sharing a w are averaged
/// and knots inside constant runs are dropped, which leaves the function unchanged.
PayoffFunction build_payoff(std::span<const double> w, std::span<const double> x_max, double strike_k);

/// Maps a tradable price at maturity back to W^X_T by inverting the GBM terminal map.
double terminal_brownian(const MarketParams& params, double x_t);

struct PriceDelta {
    double value = 0.0;
    double delta = 0.0;
};

/// Q-value of the claim at (t, x) and its delta by central difference with relative bump 1e-4.
PriceDelta price_and_delta(const PayoffFunction& payoff, const MarketParams& params, double t, double x);

/// Same for an arbitrary claim g(W^X_T), by Gauss-Hermite quadrature over the remaining increment.
PriceDelta price_and_delta(const std::function<double(double)>& payoff_of_w, const MarketParams& params, double t,
                           double x, std::size_t nodes = 96);

/// Probabilists' Gauss-Hermite rule: sum_i weight_i f(node_i) ~ E[f(Z)], Z ~ N(0, 1).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
HermiteRule gauss_hermite(std::size_t n);

/// One hedged path: value[j] is the portfolio before rebalancing at step j, and
/// value[j + 1] = value[j] + delta[j] * (x[j + 1] - x[j]).
struct HedgeTrace {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> delta;
    std::vector<double> value;
};

HedgeTrace hedge_path(const PayoffFunction& payoff, const MarketParams& params, std::size_t path,
                      std::size_t n_steps, std::uint64_t seed);

struct BacktestReport {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double initial_capital_used = 0.0;
    double empirical_success = 0.0;  ///< fraction of paths with V_T >= (K - Y_T)^+
    double success_se = 0.0;         ///< binomial standard error of empirical_success
    double claim_success = 0.0;      ///< fraction of paths with pi(X_T) >= (K - Y_T)^+
    double mean_hedge_error = 0.0;   ///< mean of V_T - pi(X_T)
    double hedge_error_sd = 0.0;
};

BacktestReport run_backtest(const PayoffFunction& payoff, const MarketParams& params, std::size_t n_paths,
                            std::size_t n_steps, std::uint64_t seed, unsigned threads = 0);

}  // namespace qhedge

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qhedge {

/// Correlated pair of geometric Brownian motions at zero interest rate:
///   dX = mu_x X dt + sigma_x X dW^X      (tradable)
///   dY = mu_y Y dt + sigma_y Y dW^Y      (nontradable, W^Y = rho W^X + sqrt(1 - rho^2) W)
/// together with a European put (strike_k - Y_T)^+ maturing at maturity_t.
struct MarketParams {
    double mu_x = 0.1;
    double sigma_x = 0.3;
    double mu_y = 0.1;
    double sigma_y = 0.3;
    double rho = 0.0;
    double x0 = 1.0;
    double y0 = 1.0;
    double maturity_t = 1.0;
    double strike_k = 1.0;

    static constexpr double kMaxAbsRho = 1.0 - 1e-6;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// Market price of risk of the tradable asset, mu_x / sigma_x.
    double theta() const { return mu_x / sigma_x; }
};

/// A realization of W^X_T under the real-world measure, i.e. a draw of N(0, T).
struct TerminalSample {
    double w = 0.0;
};

std::vector<TerminalSample> sample_terminal(const MarketParams& params, std::size_t n, std::uint64_t seed,
                                            unsigned threads = 0);

/// dP/dQ restricted to the tradable market, exp(theta w + theta^2 T / 2).
double density_p_over_q(const MarketParams& params, TerminalSample w);

/// dQ/dP, exp(-theta w - theta^2 T / 2). The capital estimator weights by this.
double density_q_over_p(const MarketParams& params, TerminalSample w);

/// Zero-rate Black-Scholes put.
double black_scholes_put(double y0, double k, double sigma, double t);

/// Simulated (X, Y) trajectories on a uniform time grid, row-major by path:
/// x[p * (n_steps + 1) + j] is X at time j * T / n_steps.
struct PathArray {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::vector<double> x;
    std::vector<double> y;

    double x_at(std::size_t path, std::size_t step) const { return x[path * (n_steps + 1) + step]; }
    double y_at(std::size_t path, std::size_t step) const { return y[path * (n_steps + 1) + step]; }
};

/// Exact lognormal transition for one path; x_out and y_out receive n_steps + 1 values.
/// simulate_paths and the backtest both draw paths through this function.
void simulate_path(const MarketParams& params, std::size_t path, std::size_t n_steps, std::uint64_t seed,
                   double* x_out, double* y_out);

PathArray simulate_paths(const MarketParams& params, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                         unsigned threads = 0);

}  // namespace qhedge

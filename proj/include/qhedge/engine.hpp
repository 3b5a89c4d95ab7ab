#pragma once

#include "qhedge/market.hpp"
#include "qhedge/success.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qhedge {

/// Raised when an intermediate quantity turns non-finite.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EngineConfig {
    std::size_t n_w = 100000;  ///< Monte Carlo sample count
    std::size_t n_x = 1000;    ///< capital grid has n_x + 1 points on [0, K]
    std::uint64_t seed = 20120101;
    SuccessFactor factor = SuccessFactor::Indicator;
    unsigned threads = 0;  ///< 0 = hardware concurrency; never changes results

    void validate() const;
};

struct FrontierPoint {
    double m = 0.0;
    double capital = 0.0;  ///< estimate of E^Q[pi]
    double success = 0.0;  ///< estimate of E^P[phi(pi, D)]
    double capital_se = 0.0;
    double success_se = 0.0;
};

/// Per-sample outcome at one slope: w_i, x^max(i) and the conditional success at x^max(i).
struct SlopeAllocation {
    std::vector<double> w;
    std::vector<double> x_max;
    std::vector<double> success;
};

struct CapitalSolution {
    double target = 0.0;
    double m_star = 0.0;
    double capital = 0.0;
    double achieved = 0.0;
    double capital_se = 0.0;
    double achieved_se = 0.0;
    /// Set when zero capital already reaches the target.
    bool unconstrained = false;
};

/// Sums in fixed blocks of sample indices, then over blocks in order, so the result
/// does not depend on how samples were distributed over threads.
inline constexpr std::size_t kReductionBlock = 2048;
double block_sum(std::span<const double> values);

/// Q-cost of an allocation, (1/N) sum exp(-theta w_i - theta^2 T / 2) x_i. The engine
/// reports capital through exactly this reduction.
double capital_from_allocation(const MarketParams& params, std::span<const double> w, std::span<const double> x_max);

/// One common-random-number sample set for a market and engine configuration.
/// Curves are recomputed on every pass; only the terminal samples are kept.
class Frontier {
public:
    Frontier(const MarketParams& params, const EngineConfig& config);

    const MarketParams& params() const { return params_; }
    const EngineConfig& config() const { return config_; }
    const std::vector<TerminalSample>& samples() const { return samples_; }

    FrontierPoint evaluate(double m, SlopeAllocation* allocation = nullptr) const;

    /// One pass over the samples for all slopes; bitwise equal to calling evaluate per slope.
    std::vector<FrontierPoint> sweep(std::span<const double> m_grid) const;

    /// Smallest slope at or above which every sample allocates zero capital.
    double zero_capital_slope() const;

    /// Largest slope whose success estimate reaches the target, and its capital.
    CapitalSolution solve_capital(double target) const;

private:
    MarketParams params_;
    EngineConfig config_;
    std::vector<TerminalSample> samples_;
    std::vector<double> q_weight_;
};

FrontierPoint evaluate_slope(const MarketParams& params, const EngineConfig& config, double m);
std::vector<FrontierPoint> sweep(const MarketParams& params, const EngineConfig& config,
                                 std::span<const double> m_grid);
CapitalSolution solve_capital(const MarketParams& params, const EngineConfig& config, double target);

}  // namespace qhedge

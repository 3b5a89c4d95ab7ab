#include "qhedge/engine.hpp"
#include "qhedge/normal.hpp"

#include "straight_line.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qhedge;

namespace {

EngineConfig small_config(std::size_t n_w = 2000, std::size_t n_x = 200, std::uint64_t seed = 1) {
    EngineConfig c;
    c.n_w = n_w;
    c.n_x = n_x;
    c.seed = seed;
    return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int k = 0; k < n; ++k) g.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    return g;
}

reference::Market to_reference(const MarketParams& p) {
    return {p.mu_x, p.sigma_x, p.mu_y, p.sigma_y, p.rho, p.y0, p.maturity_t, p.strike_k};
}

}  // namespace

TEST(EngineConfig, Validation) {
    EXPECT_NO_THROW(EngineConfig{}.validate());
    EXPECT_THROW((EngineConfig{0, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((EngineConfig{10, 1}.validate()), std::invalid_argument);
}

TEST(BlockSum, FixedOrder) {
    std::vector<double> v(5000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
    double expected = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
        double partial = 0.0;
        for (std::size_t i = b * kReductionBlock; i < std::min(v.size(), (b + 1) * kReductionBlock); ++i) {
            partial += v[i];
        }
        expected += partial;
    }
    EXPECT_EQ(block_sum(v), expected);
}

TEST(Engine, ZeroSlopeIsSuperhedge) {
    for (double rho : {-0.8, 0.0, 0.5, 0.999}) {
        MarketParams p;
        p.rho = rho;
        const Frontier f(p, small_config());
        SlopeAllocation a;
        const auto pt = f.evaluate(0.0, &a);
        for (std::size_t i = 0; i < a.x_max.size(); ++i) {
            EXPECT_EQ(a.x_max[i], p.strike_k);
            EXPECT_EQ(a.success[i], 1.0);
        }
        double weight = 0.0;
        for (const auto& s : f.samples()) weight += density_q_over_p(p, s);
        EXPECT_NEAR(pt.capital, p.strike_k * weight / static_cast<double>(a.w.size()), 1e-12);
        EXPECT_EQ(pt.success, 1.0);
    }
}

TEST(Engine, HugeSlopeIsZeroCapital) {
    MarketParams p;
    const auto pt = evaluate_slope(p, small_config(20000), 1e6);
    EXPECT_EQ(pt.capital, 0.0);
    EXPECT_NEAR(pt.success, norm_cdf(0.055 / 0.3), 1e-12);
}

TEST(Engine, EvaluateEqualsSingletonSweep) {
    MarketParams p;
    p.rho = 0.4;
    const Frontier f(p, small_config());
    const double grid[] = {0.8};
    SlopeAllocation a;
    const auto with_alloc = f.evaluate(0.8, &a);
    const auto via_sweep = f.sweep(grid).front();
    EXPECT_EQ(with_alloc.capital, via_sweep.capital);
    EXPECT_EQ(with_alloc.success, via_sweep.success);
    EXPECT_EQ(with_alloc.capital_se, via_sweep.capital_se);
    EXPECT_EQ(evaluate_slope(p, small_config(), 0.8).capital, via_sweep.capital);
}

TEST(Engine, BudgetIdentityBitwise) {
    MarketParams p;
    p.rho = -0.6;
    const Frontier f(p, small_config(5000));
    for (double m : {0.0, 0.3, 1.2, 4.0}) {
        SlopeAllocation a;
        const auto pt = f.evaluate(m, &a);
        EXPECT_EQ(capital_from_allocation(p, a.w, a.x_max), pt.capital);
    }
}

TEST(Engine, SweepMonotoneUnderCommonRandomNumbers) {
    MarketParams p;
    p.rho = 0.7;
    const auto pts = sweep(p, small_config(), log_grid(1e-3, 1e3, 40));
    for (std::size_t k = 1; k < pts.size(); ++k) {
        EXPECT_LE(pts[k].capital, pts[k - 1].capital);
        EXPECT_LE(pts[k].success, pts[k - 1].success);
    }
    for (const auto& pt : pts) {
        EXPECT_GE(pt.capital, 0.0);
        EXPECT_LE(pt.success, 1.0);
    }
}

TEST(Engine, ThreadCountDoesNotChangeResults) {
    MarketParams p;
    p.rho = 0.2;
    auto c1 = small_config(7000);
    auto c4 = c1;
    c1.threads = 1;
    c4.threads = 4;
    const auto grid = log_grid(0.01, 10.0, 7);
    const auto a = sweep(p, c1, grid);
    const auto b = sweep(p, c4, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_EQ(a[k].capital, b[k].capital);
        EXPECT_EQ(a[k].success, b[k].success);
        EXPECT_EQ(a[k].success_se, b[k].success_se);
    }
}

TEST(Engine, MatchesStraightLineReference) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int set = 0; set < 10; ++set) {
        MarketParams p;
        p.rho = -0.9 + 1.8 * u(rng);
        p.mu_x = -0.1 + 0.3 * u(rng);
        p.sigma_y = 0.1 + 0.4 * u(rng);
        const auto cfg = small_config(100, 50, 1000 + set);
        const Frontier f(p, cfg);
        std::vector<double> w;
        for (const auto& s : f.samples()) w.push_back(s.w);
        for (double m : {0.05, 0.5, 2.0}) {
            const auto ref = reference::straight_line(to_reference(p), w, 50, m);
            SlopeAllocation a;
            const auto pt = f.evaluate(m, &a);
            EXPECT_EQ(a.x_max, ref.x_max);
            EXPECT_NEAR(pt.capital, ref.capital, 1e-12 * std::max(1e-300, std::abs(ref.capital)));
            EXPECT_NEAR(pt.success, ref.success, 1e-12 * ref.success);
        }
    }
}

TEST(Engine, StandardErrorShrinks) {
    MarketParams p;
    p.rho = 0.5;
    const double grid[] = {0.5};
    const double se_small = sweep(p, small_config(2000, 100, 3), grid)[0].capital_se;
    const double se_large = sweep(p, small_config(32000, 100, 3), grid)[0].capital_se;
    EXPECT_NEAR(se_small / se_large, 4.0, 4.0 * 0.3);
}

TEST(Engine, RejectsNegativeSlope) {
    MarketParams p;
    const Frontier f(p, small_config(10, 10));
    EXPECT_THROW(f.evaluate(-1.0), std::invalid_argument);
    EXPECT_THROW(f.sweep(std::vector<double>{}), std::invalid_argument);
}

TEST(Engine, RatioFactorLagrangianDominates) {
    MarketParams p;
    p.rho = 0.5;
    auto ci = small_config(500, 100);
    auto cr = ci;
    cr.factor = SuccessFactor::Ratio;
    const auto grid = log_grid(0.1, 10.0, 5);
    const auto a = sweep(p, ci, grid);
    const auto b = sweep(p, cr, grid);
    // Zero capital: ratio success equals indicator success.
    const auto za = evaluate_slope(p, ci, 1e6);
    const auto zb = evaluate_slope(p, cr, 1e6);
    EXPECT_NEAR(za.success, zb.success, 1e-15);
    // Each factor maximizes success - m * capital over its own allocation, and the ratio
    // factor scores any allocation at least as high as the indicator does.
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_GE(b[k].success - grid[k] * b[k].capital + 1e-12, a[k].success - grid[k] * a[k].capital);
    }
}

TEST(SolveCapital, TargetBelowZeroCapitalLevel) {
    MarketParams p;
    const auto s = solve_capital(p, small_config(), 0.5);
    EXPECT_TRUE(s.unconstrained);
    EXPECT_EQ(s.capital, 0.0);
    EXPECT_GE(s.achieved, 0.5);
}

TEST(SolveCapital, TargetOneIsSuperhedge) {
    MarketParams p;
    p.rho = 0.3;
    const Frontier f(p, small_config());
    const auto s = f.solve_capital(1.0);
    EXPECT_EQ(s.m_star, 0.0);
    EXPECT_EQ(s.capital, f.evaluate(0.0).capital);
    EXPECT_EQ(s.achieved, 1.0);
}

TEST(SolveCapital, LargestSlopeReachingTarget) {
    MarketParams p;
    p.rho = 0.6;
    const Frontier f(p, small_config(3000, 150, 9));
    for (double target : {0.8, 0.95, 0.995}) {
        const auto s = f.solve_capital(target);
        EXPECT_FALSE(s.unconstrained);
        EXPECT_GE(s.achieved, target);
        const auto again = f.evaluate(s.m_star);
        EXPECT_EQ(again.capital, s.capital);
        EXPECT_EQ(again.success, s.achieved);
        // A slightly steeper slope falls short.
        EXPECT_LT(f.evaluate(s.m_star * (1.0 + 1e-9)).success, target);
    }
    EXPECT_LE(f.solve_capital(0.9).capital, f.solve_capital(0.995).capital);
}

TEST(SolveCapital, RejectsBadTarget) {
    MarketParams p;
    const Frontier f(p, small_config(10, 10));
    EXPECT_THROW(f.solve_capital(0.0), std::invalid_argument);
    EXPECT_THROW(f.solve_capital(1.2), std::invalid_argument);
}

TEST(ZeroCapitalSlope, AllocatesNothing) {
    MarketParams p;
    p.rho = -0.4;
    const Frontier f(p, small_config());
    SlopeAllocation a;
    f.evaluate(f.zero_capital_slope(), &a);
    for (double x : a.x_max) EXPECT_EQ(x, 0.0);
}

TEST(Frontier, HigherCorrelationCheaperAtHighSuccess) {
    MarketParams lo, hi;
    lo.rho = 0.3;
    hi.rho = 0.9;
    const auto cfg = small_config(5000, 100, 12);
    const Frontier f_lo(lo, cfg), f_hi(hi, cfg);
    for (double target : {0.9, 0.95, 0.99}) {
        EXPECT_LT(f_hi.solve_capital(target).capital, f_lo.solve_capital(target).capital) << target;
    }
}

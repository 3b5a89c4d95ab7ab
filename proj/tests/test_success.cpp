#include "qhedge/market.hpp"
#include "qhedge/normal.hpp"
#include "qhedge/success.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace qhedge;

namespace {

MarketParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MarketParams p;
    p.mu_x = -0.2 + 0.4 * u(rng);
    p.sigma_x = 0.05 + 0.5 * u(rng);
    p.mu_y = -0.2 + 0.4 * u(rng);
    p.sigma_y = 0.05 + 0.5 * u(rng);
    p.rho = -0.95 + 1.9 * u(rng);
    p.x0 = 0.5 + u(rng);
    p.y0 = 0.5 + u(rng);
    p.maturity_t = 0.25 + 2.0 * u(rng);
    p.strike_k = 0.5 + u(rng);
    return p;
}

// ln Y_T given W^X_T = w: mean and sd.
std::pair<double, double> log_y_law(const MarketParams& p, double w) {
    const double t = p.maturity_t;
    return {std::log(p.y0) + p.mu_y * t - 0.5 * p.sigma_y * p.sigma_y * t + p.sigma_y * p.rho * w,
            p.sigma_y * std::sqrt(t * (1.0 - p.rho * p.rho))};
}

// Density-free ratio success by adaptive Gauss-Kronrod over the independent normal.
double ratio_oracle(const MarketParams& p, double w, double x) {
    const auto [mean, sd] = log_y_law(p, w);
    const double k = p.strike_k;
    const double z_star = (std::log(k - x) - mean) / sd;
    const double survival = 0.5 * std::erfc(z_star / std::sqrt(2.0));
    auto f = [&](double z) {
        const double y = std::exp(mean + sd * z);
        return x / (k - y) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    };
    // The normal weight is below 1e-300 past -38.
    const double lo = -38.0;
    if (z_star <= lo) return survival;
    // x / (K - y) falls off on a scale of x / K below z*, so split geometrically toward z*.
    std::vector<double> cuts{lo};
    for (double d = 1.0; d > 1e-12; d *= 0.1) {
        if (z_star - d > cuts.back()) cuts.push_back(z_star - d);
    }
    cuts.push_back(z_star);
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        partial += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
    }
    return survival + partial;
}

}  // namespace

TEST(SuccessFactor, Definitions) {
    EXPECT_EQ(success_factor(SuccessFactor::Indicator, 1.0, 0.5), 1.0);
    EXPECT_EQ(success_factor(SuccessFactor::Indicator, 0.4, 0.5), 0.0);
    EXPECT_EQ(success_factor(SuccessFactor::Ratio, 0.4, 0.5), 0.8);
    EXPECT_EQ(success_factor(SuccessFactor::Ratio, 0.0, 0.0), 1.0);
    EXPECT_EQ(parse_success_factor("ratio"), SuccessFactor::Ratio);
    EXPECT_EQ(to_string(SuccessFactor::Indicator), "indicator");
    EXPECT_THROW(parse_success_factor("digital"), std::invalid_argument);
}

TEST(GIndicator, AtStrikeEqualsDensity) {
    MarketParams p;
    EXPECT_DOUBLE_EQ(g_indicator(p, {0.0}, 1.0), std::exp(1.0 / 18.0));
    EXPECT_NEAR(g_indicator(p, {0.0}, 1.0), 1.057127, 1e-6);
}

TEST(GIndicator, ZeroCapitalHandValue) {
    MarketParams p;
    const double expected = std::exp(1.0 / 18.0) * norm_cdf(0.055 / 0.3);
    EXPECT_NEAR(g_indicator(p, {0.0}, 0.0), expected, 1e-14);
    EXPECT_NEAR(g_indicator(p, {0.0}, 0.0), 0.605451, 1e-6);
}

TEST(GIndicator, RejectsCapitalOutsideRange) {
    MarketParams p;
    EXPECT_THROW(g_indicator(p, {0.0}, -0.01), std::domain_error);
    EXPECT_THROW(g_indicator(p, {0.0}, 1.01), std::domain_error);
    EXPECT_THROW(g_ratio(p, {0.0}, 1.5), std::domain_error);
}

TEST(GIndicator, ClampNearStrike) {
    MarketParams p;
    EXPECT_DOUBLE_EQ(g_indicator(p, {0.3}, 1.0 - 1e-14), density_p_over_q(p, {0.3}));
    EXPECT_TRUE(std::isfinite(g_indicator(p, {0.3}, 1.0 - 1e-9)));
}

TEST(GIndicator, MatchesConditionalMonteCarlo) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr int kDraws = 2'000'000;
    for (int set = 0; set < 20; ++set) {
        const MarketParams p = random_params(rng);
        const double w = normal(rng) * std::sqrt(p.maturity_t);
        const double x = u(rng) * p.strike_k;
        int hits = 0;
        for (int i = 0; i < kDraws; ++i) {
            const double wy = p.rho * w + std::sqrt(1.0 - p.rho * p.rho) * normal(rng) * std::sqrt(p.maturity_t);
            const double y = p.y0 * std::exp((p.mu_y - 0.5 * p.sigma_y * p.sigma_y) * p.maturity_t + p.sigma_y * wy);
            hits += std::max(p.strike_k - y, 0.0) <= x;
        }
        const double freq = static_cast<double>(hits) / kDraws;
        const double model = g_indicator(p, {w}, x) / density_p_over_q(p, {w});
        // Binomial spread under the model, floored at one hit in kDraws.
        const double se = std::sqrt(std::max(model * (1.0 - model), 1.0 / kDraws) / kDraws);
        EXPECT_NEAR(model, freq, 3.0 * se) << "set " << set;
    }
}

TEST(GIndicator, MonotoneInCapital) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (int set = 0; set < 100; ++set) {
        const MarketParams p = random_params(rng);
        const double w = 2.0 * normal(rng);
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double g = g_indicator(p, {w}, std::min(i * p.strike_k / 200.0, p.strike_k));
            EXPECT_GE(g, prev);
            prev = g;
        }
    }
}

TEST(GIndicator, MeasureConsistency) {
    MarketParams p;
    p.rho = 0.6;
    const double x = 0.25;
    const auto samples = sample_terminal(p, 200'000, 77);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& w : samples) {
        const double v = g_indicator(p, w, x) / density_p_over_q(p, w);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(samples.size());
    const double estimate = sum / n;
    const double se_a = std::sqrt((sum2 / n - estimate * estimate) / n);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    int hits = 0;
    constexpr int kDirect = 1'000'000;
    for (int i = 0; i < kDirect; ++i) {
        const double y = p.y0 * std::exp((p.mu_y - 0.5 * p.sigma_y * p.sigma_y) * p.maturity_t +
                                         p.sigma_y * std::sqrt(p.maturity_t) * normal(rng));
        hits += std::max(p.strike_k - y, 0.0) <= x;
    }
    const double direct = static_cast<double>(hits) / kDirect;
    const double se_b = std::sqrt(direct * (1.0 - direct) / kDirect);
    EXPECT_NEAR(estimate, direct, 3.0 * std::hypot(se_a, se_b));
}

TEST(GRatio, MatchesAdaptiveQuadrature) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int set = 0; set < 20; ++set) {
        const MarketParams p = random_params(rng);
        const double w = normal(rng) * std::sqrt(p.maturity_t);
        for (double frac : {1e-6, 1e-3, 0.02, u(rng), 0.5, 0.97, 0.999999}) {
            const double x = frac * p.strike_k;
            const double got = conditional_success(p, {w}, x, SuccessFactor::Ratio).success;
            EXPECT_NEAR(got, ratio_oracle(p, w, x), 1e-8) << "set " << set << " x " << x;
        }
    }
}

TEST(GRatio, Endpoints) {
    MarketParams p;
    p.rho = 0.5;
    for (double w : {-2.0, 0.0, 1.3}) {
        EXPECT_DOUBLE_EQ(g_ratio(p, {w}, p.strike_k), density_p_over_q(p, {w}));
        EXPECT_DOUBLE_EQ(g_ratio(p, {w}, 0.0), g_indicator(p, {w}, 0.0));
    }
}

TEST(GRatio, DominatesIndicator) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> normal;
    for (int set = 0; set < 30; ++set) {
        const MarketParams p = random_params(rng);
        const double w = normal(rng);
        for (int i = 0; i < 20; ++i) {
            const double x = u(rng) * p.strike_k;
            EXPECT_GE(g_ratio(p, {w}, x), g_indicator(p, {w}, x));
        }
    }
}

TEST(GRatio, MatchesDirectMonteCarlo) {
    MarketParams p;
    p.rho = 0.3;
    const double w = 0.4, x = 0.2;
    const auto [mean, sd] = log_y_law(p, w);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    double sum = 0.0, sum2 = 0.0;
    constexpr int kDraws = 1'000'000;
    for (int i = 0; i < kDraws; ++i) {
        const double d = std::max(p.strike_k - std::exp(mean + sd * normal(rng)), 0.0);
        const double phi = success_factor(SuccessFactor::Ratio, x, d);
        sum += phi;
        sum2 += phi * phi;
    }
    const double est = sum / kDraws;
    const double se = std::sqrt((sum2 / kDraws - est * est) / kDraws);
    EXPECT_NEAR(conditional_success(p, {w}, x, SuccessFactor::Ratio).success, est, 3.0 * se);
}

TEST(TabulateG, GridAndShape) {
    MarketParams p;
    p.rho = -0.4;
    for (auto factor : {SuccessFactor::Indicator, SuccessFactor::Ratio}) {
        const auto c2 = tabulate_g(p, {0.1}, factor, 2);
        ASSERT_EQ(c2.size(), 3u);
        EXPECT_EQ(c2.grid[0], 0.0);
        EXPECT_EQ(c2.grid[1], 0.5);
        EXPECT_EQ(c2.grid[2], 1.0);

        const auto c = tabulate_g(p, {-0.8}, factor, 500);
        ASSERT_EQ(c.size(), 501u);
        EXPECT_DOUBLE_EQ(c.values.back(), density_p_over_q(p, {-0.8}));
        for (std::size_t i = 1; i < c.size(); ++i) {
            EXPECT_GE(c.values[i], c.values[i - 1]);
            EXPECT_LE(c.values[i], density_p_over_q(p, {-0.8}));
            EXPECT_GE(c.log_deficit[i - 1], c.log_deficit[i]);
        }
    }
    EXPECT_THROW(tabulate_g(p, {0.0}, SuccessFactor::Indicator, 1), std::invalid_argument);
}

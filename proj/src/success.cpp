#include "qhedge/success.hpp"

#include "qhedge/normal.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qhedge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// x within this relative distance of K is treated as x = K (ln(K - x) singularity).
constexpr double kStrikeClamp = 1e-12;

// Log-decay, relative to the peak, at which the ratio integral is truncated.
constexpr double kTailLogDecay = 45.0;

struct ConditionalLaw {
    double mean;  // E[ln Y_T | W^X_T = w]
    double vol;   // sd of ln Y_T given W^X_T, sigma_y sqrt(T (1 - rho^2))
};

ConditionalLaw conditional_law(const MarketParams& p, double w) {
    const double t = p.maturity_t;
    return {std::log(p.y0) + p.mu_y * t - 0.5 * p.sigma_y * p.sigma_y * t + p.sigma_y * p.rho * w,
            p.sigma_y * std::sqrt(t * (1.0 - p.rho * p.rho))};
}

void check_capital(const MarketParams& p, double x) {
    if (!(x >= 0.0 && x <= p.strike_k)) {
        throw std::domain_error("capital level " + std::to_string(x) + " outside [0, K]");
    }
}

bool at_strike(const MarketParams& p, double x) { return x >= p.strike_k * (1.0 - kStrikeClamp); }

// Standardized threshold: Y_T >= K - x  <=>  Z >= z.
double threshold(const MarketParams& p, const ConditionalLaw& law, double x) {
    return (std::log(p.strike_k - x) - law.mean) / law.vol;
}

ConditionalSuccess indicator_success(double z) {
    // Keep the smaller tail exact and take the other as its complement.
    if (z < 0.0) {
        const double shortfall = norm_cdf(z);
        return {1.0 - shortfall, log_norm_cdf(z)};
    }
    const double success = norm_cdf(-z);
    return {success, std::log1p(-success)};
}

// E[(K - x - Y_T)/(K - Y_T); Y_T < K - x] in log form, with s = z - Z as the variable:
// Y_T = (K - x) e^{-b s}, phi(z - s) = phi(z) e^{z s - s^2/2}. The shortfall fraction
// rises from 0 on a scale x / ((K - x) b), so panels grow geometrically away from s = 0.
double log_ratio_shortfall(double strike, double x, double b, double z) {
    const double c = strike - x;
    const double peak = z > 0.0 ? 0.5 * z * z : 0.0;
    const double s_max = z >= 0.0 ? z + std::sqrt(2.0 * kTailLogDecay) : -z + std::sqrt(z * z + 2.0 * kTailLogDecay);
    const double max_len = std::min(1.0, 4.0 / std::max(1.0, -z));
    const double feature = x / (c * b);

    auto integrand = [&](double s) {
        const double e1 = -std::expm1(-b * s);
        const double frac = c * e1 / (x + c * e1);
        return frac * std::exp(z * s - 0.5 * s * s - peak);
    };

    using Rule = boost::math::quadrature::gauss<double, 20>;
    double total = 0.0;
    double a = 0.0;
    double len = std::max(std::min(feature, max_len) / 8.0, 1e-12 * max_len);
    while (a < s_max) {
        const double end = std::min(a + len, s_max);
        total += Rule::integrate(integrand, a, end);
        a = end;
        // [h, 2h], [2h, 4h], ... until the panel length reaches max_len.
        len = std::min(std::max(a, len), max_len);
    }
    if (!(total > 0.0)) return kNegInf;
    const double log_phi_z = -0.5 * z * z - kLogSqrt2Pi;
    return log_phi_z + peak + std::log(total);
}

}  // namespace

double success_factor(SuccessFactor factor, double v, double d) {
    if (v >= d) return 1.0;
    return factor == SuccessFactor::Indicator ? 0.0 : v / d;
}

std::string_view to_string(SuccessFactor factor) {
    return factor == SuccessFactor::Indicator ? "indicator" : "ratio";
}

SuccessFactor parse_success_factor(std::string_view name) {
    if (name == "indicator") return SuccessFactor::Indicator;
    if (name == "ratio") return SuccessFactor::Ratio;
    throw std::invalid_argument("unknown success factor '" + std::string(name) + "' (expected indicator|ratio)");
}

ConditionalSuccess conditional_success(const MarketParams& params, TerminalSample w, double x,
                                       SuccessFactor factor) {
    check_capital(params, x);
    if (at_strike(params, x)) return {1.0, kNegInf};
    const ConditionalLaw law = conditional_law(params, w.w);
    const double z = threshold(params, law, x);
    if (factor == SuccessFactor::Indicator || x == 0.0) {
        // phi^0_d = 1{d = 0}, so the ratio factor coincides with the indicator at zero capital.
        return indicator_success(z);
    }
    const double log_q = log_ratio_shortfall(params.strike_k, x, law.vol, z);
    return {-std::expm1(log_q), log_q};
}

double g_indicator(const MarketParams& params, TerminalSample w, double x) {
    return density_p_over_q(params, w) * conditional_success(params, w, x, SuccessFactor::Indicator).success;
}

double g_ratio(const MarketParams& params, TerminalSample w, double x) {
    return density_p_over_q(params, w) * conditional_success(params, w, x, SuccessFactor::Ratio).success;
}

TabulatedSuccess tabulate_success(const MarketParams& params, TerminalSample w, SuccessFactor factor,
                                  std::size_t n_x) {
    if (n_x < 2) throw std::invalid_argument("tabulate_g: n_x must be >= 2");
    const double density = density_p_over_q(params, w);
    const double log_density = std::log(density);
    TabulatedSuccess out;
    auto& curve = out.curve;
    curve.grid.resize(n_x + 1);
    curve.values.resize(n_x + 1);
    curve.log_deficit.resize(n_x + 1);
    out.success.resize(n_x + 1);
    for (std::size_t i = 0; i <= n_x; ++i) {
        // The last point is K itself; i K / n_x can round past it.
        const double x = i == n_x ? params.strike_k : static_cast<double>(i) * params.strike_k / static_cast<double>(n_x);
        const ConditionalSuccess s = conditional_success(params, w, x, factor);
        curve.grid[i] = x;
        curve.values[i] = density * s.success;
        curve.log_deficit[i] = log_density + s.log_shortfall;
        out.success[i] = s.success;
    }
    return out;
}

ConditionalSuccessCurve tabulate_g(const MarketParams& params, TerminalSample w, SuccessFactor factor,
                                   std::size_t n_x) {
    return tabulate_success(params, w, factor, n_x).curve;
}

}  // namespace qhedge

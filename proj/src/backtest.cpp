#include "qhedge/backtest.hpp"

#include "qhedge/normal.hpp"
#include "qhedge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qhedge {

namespace {

// Beyond this many standard deviations a kink contributes linearly or not at all.
constexpr double kWindow = 9.0;
constexpr double kDeltaBump = 1e-4;

void check_time(const MarketParams& params, double t, double x) {
    if (!(t >= 0.0 && t < params.maturity_t)) throw std::domain_error("pricing time must satisfy 0 <= t < T");
    if (!(x > 0.0)) throw std::domain_error("spot must be > 0");
}

// Centre of W^X_T given X_t = x under Q: ln X_T = ln x - sigma^2 tau / 2 + sigma (W^Q_T - W^Q_t).
double brownian_center(const MarketParams& p, double t, double x) {
    const double tau = p.maturity_t - t;
    const double s2 = p.sigma_x * p.sigma_x;
    return (std::log(x / p.x0) - (p.mu_x - 0.5 * s2) * p.maturity_t - 0.5 * s2 * tau) / p.sigma_x;
}

template <class Value>
PriceDelta bumped(double x, Value&& value) {
    const double up = x * (1.0 + kDeltaBump);
    const double down = x * (1.0 - kDeltaBump);
    return {value(x), (value(up) - value(down)) / (up - down)};
}

}  // namespace

PayoffFunction::PayoffFunction(std::vector<double> knots, std::vector<double> values, double strike_k)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size()) throw std::invalid_argument("PayoffFunction: knots and values differ in length");
    if (knots_.size() < 2) throw std::invalid_argument("PayoffFunction: needs at least 2 distinct knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i])) {
            throw std::invalid_argument("PayoffFunction: non-finite knot");
        }
        if (i > 0 && !(knots_[i] > knots_[i - 1])) {
            throw std::invalid_argument("PayoffFunction: knots must be strictly ascending");
        }
        values_[i] = std::clamp(values_[i], 0.0, strike_k);
    }
    const std::size_t n = knots_.size();
    kink_.assign(n, 0.0);
    double previous_slope = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double slope = (values_[j + 1] - values_[j]) / (knots_[j + 1] - knots_[j]);
        kink_[j] = slope - previous_slope;
        previous_slope = slope;
    }
    kink_[n - 1] = -previous_slope;
    kink_sum_.assign(n + 1, 0.0);
    kink_moment_.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        kink_sum_[j + 1] = kink_sum_[j] + kink_[j];
        kink_moment_[j + 1] = kink_moment_[j] + kink_[j] * knots_[j];
    }
}

double PayoffFunction::operator()(double w) const {
    if (w <= knots_.front()) return values_.front();
    if (w >= knots_.back()) return values_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
    const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (w == knots_[j]) return values_[j];
    const double frac = (w - knots_[j]) / (knots_[j + 1] - knots_[j]);
    return values_[j] + frac * (values_[j + 1] - values_[j]);
}

double PayoffFunction::gaussian_expectation(double center, double sd) const {
    if (!(sd > 0.0)) return (*this)(center);
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(knots_.begin(), knots_.end(), center - kWindow * sd) - knots_.begin());
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(knots_.begin(), knots_.end(), center + kWindow * sd) - knots_.begin());
    // E[(c + sd Z - k)^+] = (c - k) Phi(d) + sd phi(d), d = (c - k) / sd.
    double total = center * kink_sum_[lo] - kink_moment_[lo];
    for (std::size_t j = lo; j < hi; ++j) {
        const double gap = center - knots_[j];
        const double d = gap / sd;
        total += kink_[j] * (gap * norm_cdf(d) + sd * norm_pdf(d));
    }
    return values_.front() + total;
}

PayoffFunction build_payoff(std::span<const double> w, std::span<const double> x_max, double strike_k) {
    if (w.size() != x_max.size()) throw std::invalid_argument("build_payoff: w and x_max differ in length");
    std::vector<std::size_t> order(w.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });

    std::vector<double> knots;
    std::vector<double> values;
    for (std::size_t k = 0; k < order.size();) {
        std::size_t end = k;
        double sum = 0.0;
        while (end < order.size() && w[order[end]] == w[order[k]]) sum += x_max[order[end++]];
        knots.push_back(w[order[k]]);
        values.push_back(sum / static_cast<double>(end - k));
        k = end;
    }
    if (knots.size() < 2) throw std::invalid_argument("build_payoff: needs at least 2 distinct w knots");

    std::vector<double> kept_knots{knots.front()};
    std::vector<double> kept_values{values.front()};
    for (std::size_t j = 1; j + 1 < knots.size(); ++j) {
        if (values[j] == values[j - 1] && values[j] == values[j + 1]) continue;
        kept_knots.push_back(knots[j]);
        kept_values.push_back(values[j]);
    }
    kept_knots.push_back(knots.back());
    kept_values.push_back(values.back());
    return PayoffFunction(std::move(kept_knots), std::move(kept_values), strike_k);
}

double terminal_brownian(const MarketParams& params, double x_t) {
    const double s2 = params.sigma_x * params.sigma_x;
    return (std::log(x_t / params.x0) - (params.mu_x - 0.5 * s2) * params.maturity_t) / params.sigma_x;
}

PriceDelta price_and_delta(const PayoffFunction& payoff, const MarketParams& params, double t, double x) {
    check_time(params, t, x);
    const double sd = std::sqrt(params.maturity_t - t);
    return bumped(x,
                  [&](double spot) { return payoff.gaussian_expectation(brownian_center(params, t, spot), sd); });
}

PriceDelta price_and_delta(const std::function<double(double)>& payoff_of_w, const MarketParams& params, double t,
                           double x, std::size_t nodes) {
    check_time(params, t, x);
    const HermiteRule rule = gauss_hermite(nodes);
    const double sd = std::sqrt(params.maturity_t - t);
    return bumped(x, [&](double spot) {
        const double c = brownian_center(params, t, spot);
        double total = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) total += rule.weights[i] * payoff_of_w(c + sd * rule.nodes[i]);
        return total;
    });
}

HermiteRule gauss_hermite(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    // Newton iteration on orthonormal physicists' Hermite polynomials, then rescaled
    // to the standard normal weight.
    constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
    std::vector<double> x(n);
    std::vector<double> w(n);
    const double nd = static_cast<double>(n);
    double z = 0.0;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(nd, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int its = 0; its < 100; ++its) {
            double p1 = kPiM4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * nd) * p2;
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
        rule.weights[i] = w[n - 1 - i] / std::sqrt(std::numbers::pi);
    }
    return rule;
}

HedgeTrace hedge_path(const PayoffFunction& payoff, const MarketParams& params, std::size_t path,
                      std::size_t n_steps, std::uint64_t seed) {
    HedgeTrace trace;
    trace.x.resize(n_steps + 1);
    trace.y.resize(n_steps + 1);
    trace.delta.resize(n_steps);
    trace.value.resize(n_steps + 1);
    simulate_path(params, path, n_steps, seed, trace.x.data(), trace.y.data());
    const double dt = params.maturity_t / static_cast<double>(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const PriceDelta pd = price_and_delta(payoff, params, static_cast<double>(j) * dt, trace.x[j]);
        if (j == 0) trace.value[0] = pd.value;
        trace.delta[j] = pd.delta;
        trace.value[j + 1] = trace.value[j] + pd.delta * (trace.x[j + 1] - trace.x[j]);
    }
    return trace;
}

BacktestReport run_backtest(const PayoffFunction& payoff, const MarketParams& params, std::size_t n_paths,
                            std::size_t n_steps, std::uint64_t seed, unsigned threads) {
    params.validate();
    if (n_paths == 0 || n_steps == 0) throw std::invalid_argument("run_backtest: n_paths and n_steps must be >= 1");

    std::vector<double> hedged_ok(n_paths);
    std::vector<double> claim_ok(n_paths);
    std::vector<double> error(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const HedgeTrace trace = hedge_path(payoff, params, p, n_steps, seed);
            const double claim = std::max(params.strike_k - trace.y.back(), 0.0);
            const double target = payoff(terminal_brownian(params, trace.x.back()));
            const double v_t = trace.value.back();
            hedged_ok[p] = v_t >= claim ? 1.0 : 0.0;
            claim_ok[p] = target >= claim ? 1.0 : 0.0;
            error[p] = v_t - target;
        }
    });

    BacktestReport r;
    r.n_paths = n_paths;
    r.n_steps = n_steps;
    r.initial_capital_used = price_and_delta(payoff, params, 0.0, params.x0).value;
    const double nd = static_cast<double>(n_paths);
    double ok = 0.0, claim = 0.0, err = 0.0, err_sq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        ok += hedged_ok[p];
        claim += claim_ok[p];
        err += error[p];
        err_sq += error[p] * error[p];
    }
    r.empirical_success = ok / nd;
    r.success_se = std::sqrt(r.empirical_success * (1.0 - r.empirical_success) / nd);
    r.claim_success = claim / nd;
    r.mean_hedge_error = err / nd;
    r.hedge_error_sd = n_paths > 1 ? std::sqrt(std::max(0.0, (err_sq / nd - r.mean_hedge_error * r.mean_hedge_error) *
                                                                  nd / (nd - 1.0)))
                                   : 0.0;
    return r;
}

}  // namespace qhedge

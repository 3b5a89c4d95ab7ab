#include "qhedge/market.hpp"

#include "qhedge/normal.hpp"
#include "qhedge/parallel.hpp"
#include "qhedge/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qhedge {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) {
        throw std::invalid_argument(std::string("MarketParams.") + field + ": " + what);
    }
}

}  // namespace

void MarketParams::validate() const {
    require(std::isfinite(mu_x), "mu_x", "must be finite");
    require(std::isfinite(mu_y), "mu_y", "must be finite");
    require(std::isfinite(sigma_x) && sigma_x > 0.0, "sigma_x", "must be > 0");
    require(std::isfinite(sigma_y) && sigma_y > 0.0, "sigma_y", "must be > 0");
    require(std::isfinite(rho) && std::abs(rho) <= kMaxAbsRho, "rho", "must satisfy |rho| <= 1 - 1e-6");
    require(std::isfinite(x0) && x0 > 0.0, "x0", "must be > 0");
    require(std::isfinite(y0) && y0 > 0.0, "y0", "must be > 0");
    require(std::isfinite(maturity_t) && maturity_t > 0.0, "maturity_t", "must be > 0");
    require(std::isfinite(strike_k) && strike_k > 0.0, "strike_k", "must be > 0");
}

std::vector<TerminalSample> sample_terminal(const MarketParams& params, std::size_t n, std::uint64_t seed,
                                            unsigned threads) {
    params.validate();
    if (n == 0) throw std::invalid_argument("sample_terminal: n must be >= 1");
    const Philox gen(seed);
    const double scale = std::sqrt(params.maturity_t);
    std::vector<TerminalSample> out(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i].w = scale * standard_normal(gen, Stream::TerminalSample, i);
        }
    });
    return out;
}

double density_p_over_q(const MarketParams& params, TerminalSample w) {
    const double theta = params.theta();
    return std::exp(theta * w.w + 0.5 * theta * theta * params.maturity_t);
}

double density_q_over_p(const MarketParams& params, TerminalSample w) {
    const double theta = params.theta();
    return std::exp(-theta * w.w - 0.5 * theta * theta * params.maturity_t);
}

double black_scholes_put(double y0, double k, double sigma, double t) {
    if (!(y0 > 0.0 && k > 0.0 && sigma > 0.0 && t > 0.0)) {
        throw std::invalid_argument("black_scholes_put: all arguments must be > 0");
    }
    const double vol = sigma * std::sqrt(t);
    const double d1 = (std::log(y0 / k) + 0.5 * vol * vol) / vol;
    const double d2 = d1 - vol;
    return k * norm_cdf(-d2) - y0 * norm_cdf(-d1);
}

void simulate_path(const MarketParams& params, std::size_t path, std::size_t n_steps, std::uint64_t seed,
                   double* x_out, double* y_out) {
    const Philox gen(seed);
    const double dt = params.maturity_t / static_cast<double>(n_steps);
    const double sqdt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - params.rho * params.rho);
    const double drift_x = (params.mu_x - 0.5 * params.sigma_x * params.sigma_x) * dt;
    const double drift_y = (params.mu_y - 0.5 * params.sigma_y * params.sigma_y) * dt;
    double log_x = std::log(params.x0);
    double log_y = std::log(params.y0);
    x_out[0] = params.x0;
    y_out[0] = params.y0;
    for (std::size_t j = 0; j < n_steps; ++j) {
        // Both normals of a step come from one Philox block.
        const std::uint64_t index = static_cast<std::uint64_t>(path) * n_steps + j;
        const double z_x = standard_normal(gen, Stream::PathIncrement, index, 0);
        const double z_o = standard_normal(gen, Stream::PathIncrement, index, 1);
        const double dw_x = sqdt * z_x;
        const double dw_y = params.rho * dw_x + rho_c * sqdt * z_o;
        log_x += drift_x + params.sigma_x * dw_x;
        log_y += drift_y + params.sigma_y * dw_y;
        x_out[j + 1] = std::exp(log_x);
        y_out[j + 1] = std::exp(log_y);
    }
}

PathArray simulate_paths(const MarketParams& params, std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                         unsigned threads) {
    params.validate();
    if (n_paths == 0 || n_steps == 0) {
        throw std::invalid_argument("simulate_paths: n_paths and n_steps must be >= 1");
    }
    PathArray out;
    out.n_paths = n_paths;
    out.n_steps = n_steps;
    out.dt = params.maturity_t / static_cast<double>(n_steps);
    out.x.resize(n_paths * (n_steps + 1));
    out.y.resize(n_paths * (n_steps + 1));
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            simulate_path(params, p, n_steps, seed, &out.x[p * (n_steps + 1)], &out.y[p * (n_steps + 1)]);
        }
    });
    return out;
}

}  // namespace qhedge

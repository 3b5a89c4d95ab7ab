#include "qhedge/engine.hpp"

#include "qhedge/envelope.hpp"
#include "qhedge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qhedge {

namespace {

struct Moments {
    double capital = 0.0;
    double capital_sq = 0.0;
    double success = 0.0;
    double success_sq = 0.0;

    void add(double c, double s) {
        capital += c;
        capital_sq += c * c;
        success += s;
        success_sq += s * s;
    }
    void merge(const Moments& o) {
        capital += o.capital;
        capital_sq += o.capital_sq;
        success += o.success;
        success_sq += o.success_sq;
    }
};

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

double standard_error(double sum, double sum_sq, std::size_t n) {
    if (n < 2) return 0.0;
    const double nd = static_cast<double>(n);
    const double mean = sum / nd;
    const double var = std::max(0.0, (sum_sq / nd - mean * mean) * nd / (nd - 1.0));
    return std::sqrt(var / nd);
}

FrontierPoint finish(double m, const Moments& total, std::size_t n) {
    const double nd = static_cast<double>(n);
    FrontierPoint p{m, total.capital / nd, total.success / nd, standard_error(total.capital, total.capital_sq, n),
                    standard_error(total.success, total.success_sq, n)};
    if (!std::isfinite(p.capital) || !std::isfinite(p.success) || !std::isfinite(p.capital_se) ||
        !std::isfinite(p.success_se)) {
        throw NumericalError("non-finite frontier estimate at m = " + std::to_string(m));
    }
    return p;
}

void check_slope(double m) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
        throw std::invalid_argument("slope m must be finite and >= 0");
    }
}

// Hull vertices of one sample that can be selected for slopes in a bracket.
struct CandidateSet {
    std::vector<std::size_t> offset;  // per sample, into the flat arrays; size n + 1
    std::vector<double> x;
    std::vector<double> g;
    std::vector<double> log_deficit;
    std::vector<double> success;
};

}  // namespace

void EngineConfig::validate() const {
    if (n_w < 1) throw std::invalid_argument("EngineConfig.n_w: must be >= 1");
    if (n_x < 2) throw std::invalid_argument("EngineConfig.n_x: must be >= 2");
}

double block_sum(std::span<const double> values) {
    double total = 0.0;
    for (std::size_t b = 0; b < block_count(values.size()); ++b) {
        const std::size_t end = std::min(values.size(), (b + 1) * kReductionBlock);
        double partial = 0.0;
        for (std::size_t i = b * kReductionBlock; i < end; ++i) partial += values[i];
        total += partial;
    }
    return total;
}

double capital_from_allocation(const MarketParams& params, std::span<const double> w, std::span<const double> x_max) {
    if (w.size() != x_max.size() || w.empty()) {
        throw std::invalid_argument("capital_from_allocation: w and x_max must be non-empty and equally sized");
    }
    std::vector<double> cost(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) cost[i] = density_q_over_p(params, {w[i]}) * x_max[i];
    return block_sum(cost) / static_cast<double>(w.size());
}

Frontier::Frontier(const MarketParams& params, const EngineConfig& config) : params_(params), config_(config) {
    params_.validate();
    config_.validate();
    samples_ = sample_terminal(params_, config_.n_w, config_.seed, config_.threads);
    q_weight_.resize(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) q_weight_[i] = density_q_over_p(params_, samples_[i]);
}

std::vector<FrontierPoint> Frontier::sweep(std::span<const double> m_grid) const {
    if (m_grid.empty()) throw std::invalid_argument("sweep: empty slope grid");
    for (double m : m_grid) check_slope(m);
    const std::size_t n = samples_.size();
    const std::size_t n_m = m_grid.size();
    const std::size_t n_blocks = block_count(n);
    std::vector<Moments> partial(n_blocks * n_m);

    parallel_for(n_blocks, config_.threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            Moments* acc = &partial[b * n_m];
            const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
            for (std::size_t i = b * kReductionBlock; i < end; ++i) {
                const auto tab = tabulate_success(params_, samples_[i], config_.factor, config_.n_x);
                const auto& c = tab.curve;
                for (std::size_t k = 0; k < n_m; ++k) {
                    const std::size_t j = argmax_objective(c.grid, c.values, c.log_deficit, m_grid[k]);
                    acc[k].add(q_weight_[i] * c.grid[j], tab.success[j]);
                }
            }
        }
    });

    std::vector<FrontierPoint> out;
    out.reserve(n_m);
    for (std::size_t k = 0; k < n_m; ++k) {
        Moments total;
        for (std::size_t b = 0; b < n_blocks; ++b) total.merge(partial[b * n_m + k]);
        out.push_back(finish(m_grid[k], total, n));
    }
    return out;
}

FrontierPoint Frontier::evaluate(double m, SlopeAllocation* allocation) const {
    if (allocation == nullptr) {
        const double grid[] = {m};
        return sweep(grid).front();
    }
    check_slope(m);
    const std::size_t n = samples_.size();
    allocation->w.resize(n);
    allocation->x_max.resize(n);
    allocation->success.resize(n);
    parallel_for(n, config_.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto tab = tabulate_success(params_, samples_[i], config_.factor, config_.n_x);
            const auto& c = tab.curve;
            const std::size_t j = argmax_objective(c.grid, c.values, c.log_deficit, m);
            allocation->w[i] = samples_[i].w;
            allocation->x_max[i] = c.grid[j];
            allocation->success[i] = tab.success[j];
        }
    });
    std::vector<Moments> partial(block_count(n));
    for (std::size_t b = 0; b < partial.size(); ++b) {
        const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
        for (std::size_t i = b * kReductionBlock; i < end; ++i) {
            partial[b].add(q_weight_[i] * allocation->x_max[i], allocation->success[i]);
        }
    }
    Moments total;
    for (const auto& p : partial) total.merge(p);
    return finish(m, total, n);
}

double Frontier::zero_capital_slope() const {
    std::vector<double> steepest(samples_.size());
    parallel_for(samples_.size(), config_.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto c = tabulate_g(params_, samples_[i], config_.factor, config_.n_x);
            const auto hull = upper_hull_indices(c);
            // The first hull edge carries the largest chord slope out of x = 0.
            steepest[i] = hull.size() < 2 ? 0.0 : (c.values[hull[1]] - c.values[0]) / (c.grid[hull[1]] - c.grid[0]);
        }
    });
    const double top = *std::max_element(steepest.begin(), steepest.end());
    return top > 0.0 ? top * (1.0 + 1e-9) : 1.0;
}

CapitalSolution Frontier::solve_capital(double target) const {
    if (!(target > 0.0 && target <= 1.0)) {
        throw std::invalid_argument("solve_capital: target must lie in (0, 1]");
    }
    auto solution_at = [&](const FrontierPoint& p, bool unconstrained) {
        return CapitalSolution{target, p.m, p.capital, p.success, p.capital_se, p.success_se, unconstrained};
    };
    if (target >= 1.0) {
        // With |rho| < 1 only the superhedge is certain.
        return solution_at(evaluate(0.0), false);
    }

    const double m_top = zero_capital_slope();
    std::vector<double> coarse{0.0};
    constexpr int kCoarse = 120;
    for (int k = 0; k <= kCoarse; ++k) coarse.push_back(m_top * std::pow(10.0, -10.0 + 10.0 * k / kCoarse));
    const auto frontier = sweep(coarse);
    if (frontier.back().success >= target) return solution_at(frontier.back(), true);

    std::size_t hit = 0;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
        if (frontier[k].success >= target) hit = k;
    }
    const double m_lo = coarse[hit];
    const double m_hi = coarse[hit + 1];

    // Within [m_lo, m_hi] each sample only moves between hull vertices lying between
    // its maximizers at the two ends.
    const std::size_t n = samples_.size();
    std::vector<CandidateSet> parts(block_count(n));
    parallel_for(parts.size(), config_.threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            auto& part = parts[b];
            const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
            part.offset.push_back(0);
            for (std::size_t i = b * kReductionBlock; i < end; ++i) {
                const auto tab = tabulate_success(params_, samples_[i], config_.factor, config_.n_x);
                const auto& c = tab.curve;
                const std::size_t left = argmax_objective(c.grid, c.values, c.log_deficit, m_hi);
                const std::size_t right = argmax_objective(c.grid, c.values, c.log_deficit, m_lo);
                std::vector<std::size_t> keep{left};
                for (std::size_t j : upper_hull_indices(c)) {
                    if (j > left && j < right) keep.push_back(j);
                }
                if (right != left) keep.push_back(right);
                for (std::size_t j : keep) {
                    part.x.push_back(c.grid[j]);
                    part.g.push_back(c.values[j]);
                    part.log_deficit.push_back(c.log_deficit[j]);
                    part.success.push_back(tab.success[j]);
                }
                part.offset.push_back(part.x.size());
            }
        }
    });

    auto success_at = [&](double m) {
        double total = 0.0;
        for (std::size_t b = 0; b < parts.size(); ++b) {
            const auto& part = parts[b];
            double partial = 0.0;
            for (std::size_t s = 0; s + 1 < part.offset.size(); ++s) {
                const std::size_t o = part.offset[s];
                const std::size_t len = part.offset[s + 1] - o;
                const std::size_t j = argmax_objective(std::span(part.x).subspan(o, len),
                                                       std::span(part.g).subspan(o, len),
                                                       std::span(part.log_deficit).subspan(o, len), m);
                partial += part.success[o + j];
            }
            total += partial;
        }
        return total / static_cast<double>(n);
    };

    double lo = m_lo;
    double hi = m_hi;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (success_at(mid) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    FrontierPoint best = evaluate(lo);
    if (best.success < target) best = frontier[hit];
    return solution_at(best, false);
}

FrontierPoint evaluate_slope(const MarketParams& params, const EngineConfig& config, double m) {
    return Frontier(params, config).evaluate(m);
}

std::vector<FrontierPoint> sweep(const MarketParams& params, const EngineConfig& config,
                                 std::span<const double> m_grid) {
    return Frontier(params, config).sweep(m_grid);
}

CapitalSolution solve_capital(const MarketParams& params, const EngineConfig& config, double target) {
    return Frontier(params, config).solve_capital(target);
}

}  // namespace qhedge

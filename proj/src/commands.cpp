#include "qhedge/commands.hpp"

#include <ostream>

namespace qhedge {

namespace {

void emit(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::vector<FrontierRow> cmd_frontier(const RunConfig& config, std::ostream& csv) {
    config.validate();
    const auto grid = config.m_grid.expand();
    std::vector<FrontierRow> rows;
    for (double rho : config.rho_list) {
        const Frontier frontier(config.market_for(rho), config.engine);
        for (const auto& p : frontier.sweep(grid)) rows.push_back({rho, p});
    }
    config.write_echo(csv);
    emit(csv, {"rho", "m", "capital", "capital_se", "success", "success_se"});
    for (const auto& r : rows) {
        emit(csv, {fmt(r.rho), fmt(r.point.m), fmt(r.point.capital), fmt(r.point.capital_se), fmt(r.point.success),
                   fmt(r.point.success_se)});
    }
    return rows;
}

std::vector<SolveRow> cmd_solve(const RunConfig& config, std::ostream& csv) {
    config.validate();
    std::vector<SolveRow> rows;
    for (double rho : config.rho_list) {
        const Frontier frontier(config.market_for(rho), config.engine);
        rows.push_back({rho, frontier.solve_capital(config.target)});
    }
    config.write_echo(csv);
    emit(csv, {"rho", "target", "m_star", "capital", "capital_se", "achieved", "achieved_se", "unconstrained"});
    for (const auto& r : rows) {
        const auto& s = r.solution;
        emit(csv, {fmt(r.rho), fmt(s.target), fmt(s.m_star), fmt(s.capital), fmt(s.capital_se), fmt(s.achieved),
                   fmt(s.achieved_se), s.unconstrained ? "1" : "0"});
    }
    return rows;
}

std::vector<BacktestRow> cmd_backtest(const RunConfig& config, std::ostream& csv) {
    config.validate();
    std::vector<BacktestRow> rows;
    for (double rho : config.rho_list) {
        const MarketParams params = config.market_for(rho);
        const Frontier frontier(params, config.engine);
        const double m = config.m ? *config.m : frontier.solve_capital(config.target).m_star;
        SlopeAllocation allocation;
        const FrontierPoint predicted = frontier.evaluate(m, &allocation);
        const PayoffFunction payoff = build_payoff(allocation.w, allocation.x_max, params.strike_k);
        const BacktestReport report = run_backtest(payoff, params, config.n_paths, config.n_steps,
                                                   config.engine.seed, config.engine.threads);
        rows.push_back({rho, m, predicted, report});
    }
    config.write_echo(csv);
    emit(csv, {"rho", "m", "engine_capital", "initial_capital_used", "predicted_success", "predicted_success_se",
               "empirical_success", "empirical_success_se", "success_gap", "claim_success", "mean_hedge_error",
               "hedge_error_sd", "n_paths", "n_steps"});
    for (const auto& r : rows) {
        const auto& b = r.report;
        emit(csv, {fmt(r.rho), fmt(r.m), fmt(r.predicted.capital), fmt(b.initial_capital_used), fmt(r.predicted.success),
                   fmt(r.predicted.success_se), fmt(b.empirical_success), fmt(b.success_se),
                   fmt(b.empirical_success - r.predicted.success), fmt(b.claim_success), fmt(b.mean_hedge_error),
                   fmt(b.hedge_error_sd), std::to_string(b.n_paths), std::to_string(b.n_steps)});
    }
    return rows;
}

void print_solve_summary(const std::vector<SolveRow>& rows, std::ostream& os) {
    for (const auto& r : rows) {
        const auto& s = r.solution;
        os << "rho=" << fmt(r.rho) << "  target=" << fmt(s.target) << "  m*=" << fmt(s.m_star)
           << "  capital=" << fmt(s.capital) << " (se " << fmt(s.capital_se) << ")"
           << "  achieved=" << fmt(s.achieved);
        if (s.unconstrained) os << "  [unconstrained: zero capital already meets the target]";
        os << '\n';
    }
}

void print_backtest_summary(const std::vector<BacktestRow>& rows, std::ostream& os) {
    for (const auto& r : rows) {
        const auto& b = r.report;
        os << "rho=" << fmt(r.rho) << "  m=" << fmt(r.m) << "  V0=" << fmt(b.initial_capital_used)
           << "  predicted=" << fmt(r.predicted.success) << "  empirical=" << fmt(b.empirical_success)
           << "  gap=" << fmt(b.empirical_success - r.predicted.success) << "  claim=" << fmt(b.claim_success)
           << "  mean_hedge_error=" << fmt(b.mean_hedge_error) << '\n';
    }
}

}  // namespace qhedge

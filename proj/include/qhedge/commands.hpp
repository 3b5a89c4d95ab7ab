#pragma once

#include "qhedge/backtest.hpp"
#include "qhedge/engine.hpp"
#include "qhedge/run_config.hpp"

#include <iosfwd>
#include <vector>

namespace qhedge {

struct FrontierRow {
    double rho = 0.0;
    FrontierPoint point;
};

struct SolveRow {
    double rho = 0.0;
    CapitalSolution solution;
};

struct BacktestRow {
    double rho = 0.0;
    double m = 0.0;
    FrontierPoint predicted;
    BacktestReport report;
};

// Each command validates the config, writes its CSV (echo header, column header,
// rows) to `csv` and returns the rows.
std::vector<FrontierRow> cmd_frontier(const RunConfig& config, std::ostream& csv);
std::vector<SolveRow> cmd_solve(const RunConfig& config, std::ostream& csv);
std::vector<BacktestRow> cmd_backtest(const RunConfig& config, std::ostream& csv);

void print_solve_summary(const std::vector<SolveRow>& rows, std::ostream& os);
void print_backtest_summary(const std::vector<BacktestRow>& rows, std::ostream& os);

}  // namespace qhedge

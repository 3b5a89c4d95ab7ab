// qhedge: quantile-hedging frontiers, minimal capital and hedging backtests for a
// put on a nontradable asset hedged with a correlated tradable one.

#include "qhedge/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

const std::vector<Flag> kFlags{
    {"--mu-x", "mu_x", "drift of the tradable asset X"},
    {"--sigma-x", "sigma_x", "volatility of X"},
    {"--mu-y", "mu_y", "drift of the nontradable asset Y"},
    {"--sigma-y", "sigma_y", "volatility of Y"},
    {"--rho", "rho", "correlation list, e.g. 0.3,0.6,0.9"},
    {"--x0", "x0", "initial price of X"},
    {"--y0", "y0", "initial price of Y"},
    {"--maturity-t", "maturity_t", "maturity in years"},
    {"--strike-k", "strike_k", "put strike"},
    {"--n-w", "n_w", "Monte Carlo sample count"},
    {"--n-x", "n_x", "capital grid size"},
    {"--seed", "seed", "64-bit seed"},
    {"--factor", "factor", "success factor: indicator|ratio"},
    {"--m-grid", "m_grid", "slope grid lo:hi:n,log|lin"},
    {"--target", "target", "target success probability"},
    {"--m", "m", "slope defining the backtested claim (default: solve for --target)"},
    {"--n-paths", "n_paths", "backtest path count"},
    {"--n-steps", "n_steps", "backtest rebalancing steps"},
    {"--threads", "threads", "worker threads, 0 = all cores (results do not depend on it)"},
    {"--out", "out", "CSV output path (default: stdout)"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile hedging of a put on a nontradable asset"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::pair<const Flag*, std::string>> values(kFlags.size());

    std::vector<CLI::App*> commands{
        app.add_subcommand("frontier", "sweep slopes and print the capital / success frontier per rho"),
        app.add_subcommand("solve", "minimal capital reaching --target success probability"),
        app.add_subcommand("backtest", "delta-hedge the optimal claim along simulated paths"),
    };
    for (auto* cmd : commands) {
        cmd->add_option("--config", config_path, "key = value config file (flags override it)");
        for (std::size_t i = 0; i < kFlags.size(); ++i) {
            values[i].first = &kFlags[i];
            cmd->add_option(kFlags[i].name, values[i].second, kFlags[i].help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        qhedge::RunConfig config;
        if (!config_path.empty()) config.load_file(config_path);
        for (const auto& [flag, value] : values) {
            if (!value.empty()) config.set(flag->key, value, flag->name);
        }
        config.validate();

        std::ofstream file;
        if (!config.out.empty()) {
            file.open(config.out, std::ios::binary);
            if (!file) throw qhedge::ConfigError("--out: cannot open '" + config.out + "' for writing");
        }
        std::ostream& csv = config.out.empty() ? std::cout : file;
        std::ostream& summary = config.out.empty() ? std::cerr : std::cout;

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "frontier") {
            qhedge::cmd_frontier(config, csv);
        } else if (name == "solve") {
            qhedge::print_solve_summary(qhedge::cmd_solve(config, csv), summary);
        } else {
            qhedge::print_backtest_summary(qhedge::cmd_backtest(config, csv), summary);
        }
        csv.flush();
        if (!csv) throw std::runtime_error("failed writing CSV output");
    } catch (const qhedge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qhedge::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

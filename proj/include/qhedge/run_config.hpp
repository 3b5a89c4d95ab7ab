#pragma once

#include "qhedge/engine.hpp"
#include "qhedge/market.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qhedge {

/// Invalid configuration; the message names the offending field and where it came from.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "lo:hi:n,log" or "lo:hi:n,lin".
struct SlopeGridSpec {
    double lo = 1e-3;
    double hi = 1e3;
    std::size_t n = 30;
    bool log_spaced = true;

    static SlopeGridSpec parse(std::string_view text);
    std::string to_string() const;
    std::vector<double> expand() const;
};

/// Effective settings for one CLI run: defaults, then the config file, then flags.
struct RunConfig {
    MarketParams market;  // market.rho is unused; see rho_list
    std::vector<double> rho_list{0.0};
    EngineConfig engine;
    SlopeGridSpec m_grid;
    double target = 0.995;
    std::optional<double> m;  // backtest slope; the target defines it when unset
    std::size_t n_paths = 10000;
    std::size_t n_steps = 250;
    std::string out;

    /// Sets one key from its textual value. `origin` prefixes error messages,
    /// e.g. "run.cfg:7" or "--sigma-x".
    void set(std::string_view key, std::string_view value, const std::string& origin);

    /// Reads `key = value` lines; '#' starts a comment line.
    void load_file(const std::string& path);

    /// Re-checks every module invariant; throws ConfigError naming the field.
    void validate() const;

    MarketParams market_for(double rho) const;

    /// Every key that affects results, as `# key = value` lines. Stripping the leading
    /// "# " yields a config file that reproduces the run.
    void write_echo(std::ostream& os) const;

    /// Keys accepted by set(), in echo order.
    static const std::vector<std::string>& keys();

private:
    std::map<std::string, std::string> origin_;
};

/// Shortest decimal text that reads back to the same double ('.' separator, no locale).
std::string format_double(double v);

}  // namespace qhedge

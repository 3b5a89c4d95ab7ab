#include "qhedge/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qhedge {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
    std::string k(trim(key));
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

[[noreturn]] void fail(const std::string& origin, std::string_view key, const std::string& what) {
    throw ConfigError(origin + ": field '" + std::string(key) + "': " + what);
}

double parse_double(std::string_view text, const std::string& origin, std::string_view key) {
    text = trim(text);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        fail(origin, key, "invalid number '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text, const std::string& origin, std::string_view key) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        fail(origin, key, "invalid non-negative integer '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

SlopeGridSpec SlopeGridSpec::parse(std::string_view text) {
    const auto comma = split(trim(text), ',');
    if (comma.size() != 2) throw std::invalid_argument("expected lo:hi:n,log|lin");
    const auto parts = split(comma[0], ':');
    if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:n,log|lin");
    SlopeGridSpec spec;
    const std::string where = "m_grid";
    spec.lo = parse_double(parts[0], where, "lo");
    spec.hi = parse_double(parts[1], where, "hi");
    spec.n = parse_unsigned(parts[2], where, "n");
    const auto kind = trim(comma[1]);
    if (kind == "log") {
        spec.log_spaced = true;
    } else if (kind == "lin") {
        spec.log_spaced = false;
    } else {
        throw std::invalid_argument("spacing must be 'log' or 'lin'");
    }
    if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(spec.lo >= 0.0) || !(spec.hi >= spec.lo) || !std::isfinite(spec.hi)) {
        throw std::invalid_argument("need 0 <= lo <= hi < inf");
    }
    if (spec.log_spaced && !(spec.lo > 0.0)) throw std::invalid_argument("log spacing needs lo > 0");
    return spec;
}

std::string SlopeGridSpec::to_string() const {
    return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(n) + (log_spaced ? ",log" : ",lin");
}

std::vector<double> SlopeGridSpec::expand() const {
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        grid[k] = log_spaced ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
    }
    if (n > 1) grid.back() = hi;
    return grid;
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{
        "mu_x", "sigma_x", "mu_y", "sigma_y", "rho",    "x0",    "y0",      "maturity_t", "strike_k", "n_w",
        "n_x",  "seed",    "factor", "m_grid", "target", "m",    "n_paths", "n_steps",    "threads",  "out"};
    return k;
}

void RunConfig::set(std::string_view raw_key, std::string_view raw_value, const std::string& origin) {
    const std::string key = normalize_key(raw_key);
    const std::string_view value = trim(raw_value);
    auto num = [&] { return parse_double(value, origin, key); };
    auto count = [&] { return parse_unsigned(value, origin, key); };

    if (key == "mu_x") market.mu_x = num();
    else if (key == "sigma_x") market.sigma_x = num();
    else if (key == "mu_y") market.mu_y = num();
    else if (key == "sigma_y") market.sigma_y = num();
    else if (key == "x0") market.x0 = num();
    else if (key == "y0") market.y0 = num();
    else if (key == "maturity_t") market.maturity_t = num();
    else if (key == "strike_k") market.strike_k = num();
    else if (key == "rho") {
        rho_list.clear();
        for (auto part : split(value, ',')) rho_list.push_back(parse_double(part, origin, key));
    } else if (key == "n_w") engine.n_w = count();
    else if (key == "n_x") engine.n_x = count();
    else if (key == "seed") engine.seed = count();
    else if (key == "threads") engine.threads = static_cast<unsigned>(count());
    else if (key == "factor") {
        try {
            engine.factor = parse_success_factor(value);
        } catch (const std::invalid_argument& e) {
            fail(origin, key, e.what());
        }
    } else if (key == "m_grid") {
        try {
            m_grid = SlopeGridSpec::parse(value);
        } catch (const std::exception& e) {
            fail(origin, key, std::string("invalid slope grid '") + std::string(value) + "': " + e.what());
        }
    } else if (key == "target") target = num();
    else if (key == "m") m = num();
    else if (key == "n_paths") n_paths = count();
    else if (key == "n_steps") n_steps = count();
    else if (key == "out") out = std::string(value);
    else throw ConfigError(origin + ": unknown key '" + key + "'");
    origin_[key] = origin;
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        const std::string origin = path + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) throw ConfigError(origin + ": expected 'key = value'");
        set(body.substr(0, eq), body.substr(eq + 1), origin);
    }
}

void RunConfig::validate() const {
    auto where = [&](const std::string& key) {
        const auto it = origin_.find(key);
        return it == origin_.end() ? std::string("default") : it->second;
    };
    if (rho_list.empty()) throw ConfigError(where("rho") + ": field 'rho': empty list");
    for (double rho : rho_list) {
        try {
            market_for(rho).validate();
        } catch (const std::invalid_argument& e) {
            // "MarketParams.<field>: ..." -> report the field with its origin.
            std::string msg = e.what();
            std::string field = msg.substr(msg.find('.') + 1, msg.find(':') - msg.find('.') - 1);
            throw ConfigError(where(field) + ": field '" + field + "': " + msg.substr(msg.find(':') + 2));
        }
    }
    if (engine.n_w < 1) throw ConfigError(where("n_w") + ": field 'n_w': must be >= 1");
    if (engine.n_x < 2) throw ConfigError(where("n_x") + ": field 'n_x': must be >= 2");
    if (!(target > 0.0 && target <= 1.0)) throw ConfigError(where("target") + ": field 'target': must lie in (0, 1]");
    if (m && !(*m >= 0.0 && std::isfinite(*m))) throw ConfigError(where("m") + ": field 'm': must be finite and >= 0");
    if (n_paths < 1) throw ConfigError(where("n_paths") + ": field 'n_paths': must be >= 1");
    if (n_steps < 1) throw ConfigError(where("n_steps") + ": field 'n_steps': must be >= 1");
}

MarketParams RunConfig::market_for(double rho) const {
    MarketParams p = market;
    p.rho = rho;
    return p;
}

void RunConfig::write_echo(std::ostream& os) const {
    auto line = [&](const char* key, const std::string& value) { os << "# " << key << " = " << value << '\n'; };
    line("mu_x", format_double(market.mu_x));
    line("sigma_x", format_double(market.sigma_x));
    line("mu_y", format_double(market.mu_y));
    line("sigma_y", format_double(market.sigma_y));
    std::string rhos;
    for (std::size_t i = 0; i < rho_list.size(); ++i) rhos += (i ? "," : "") + format_double(rho_list[i]);
    line("rho", rhos);
    line("x0", format_double(market.x0));
    line("y0", format_double(market.y0));
    line("maturity_t", format_double(market.maturity_t));
    line("strike_k", format_double(market.strike_k));
    line("n_w", std::to_string(engine.n_w));
    line("n_x", std::to_string(engine.n_x));
    line("seed", std::to_string(engine.seed));
    line("factor", std::string(to_string(engine.factor)));
    line("m_grid", m_grid.to_string());
    line("target", format_double(target));
    if (m) line("m", format_double(*m));
    line("n_paths", std::to_string(n_paths));
    line("n_steps", std::to_string(n_steps));
}

}  // namespace qhedge

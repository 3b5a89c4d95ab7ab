#include "qhedge/backtest.hpp"
#include "qhedge/engine.hpp"
#include "qhedge/envelope.hpp"
#include "qhedge/market.hpp"
#include "qhedge/success.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qhedge;

namespace {

std::string repr_fields(const char* name, std::initializer_list<std::pair<const char*, double>> fields) {
    std::string out = std::string(name) + "(";
    bool first = true;
    for (const auto& [k, v] : fields) {
        if (!first) out += ", ";
        out += std::string(k) + "=" + py::repr(py::float_(v)).cast<std::string>();
        first = false;
    }
    return out + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantile hedging core";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<SuccessFactor>(m, "SuccessFactor")
        .value("Indicator", SuccessFactor::Indicator)
        .value("Ratio", SuccessFactor::Ratio);

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init([](double mu_x, double sigma_x, double mu_y, double sigma_y, double rho, double x0, double y0,
                         double maturity_t, double strike_k) {
                 MarketParams p{mu_x, sigma_x, mu_y, sigma_y, rho, x0, y0, maturity_t, strike_k};
                 p.validate();
                 return p;
             }),
             py::arg("mu_x") = 0.1, py::arg("sigma_x") = 0.3, py::arg("mu_y") = 0.1, py::arg("sigma_y") = 0.3,
             py::arg("rho") = 0.0, py::arg("x0") = 1.0, py::arg("y0") = 1.0, py::arg("maturity_t") = 1.0,
             py::arg("strike_k") = 1.0)
        .def_readwrite("mu_x", &MarketParams::mu_x)
        .def_readwrite("sigma_x", &MarketParams::sigma_x)
        .def_readwrite("mu_y", &MarketParams::mu_y)
        .def_readwrite("sigma_y", &MarketParams::sigma_y)
        .def_readwrite("rho", &MarketParams::rho)
        .def_readwrite("x0", &MarketParams::x0)
        .def_readwrite("y0", &MarketParams::y0)
        .def_readwrite("maturity_t", &MarketParams::maturity_t)
        .def_readwrite("strike_k", &MarketParams::strike_k)
        .def("validate", &MarketParams::validate)
        .def_property_readonly("theta", &MarketParams::theta)
        .def("__repr__", [](const MarketParams& p) {
            return repr_fields("MarketParams", {{"mu_x", p.mu_x},
                                                              {"sigma_x", p.sigma_x},
                                                              {"mu_y", p.mu_y},
                                                              {"sigma_y", p.sigma_y},
                                                              {"rho", p.rho},
                                                              {"x0", p.x0},
                                                              {"y0", p.y0},
                                                              {"maturity_t", p.maturity_t},
                                                              {"strike_k", p.strike_k}});
        });

    py::class_<EngineConfig>(m, "EngineConfig")
        .def(py::init([](std::size_t n_w, std::size_t n_x, std::uint64_t seed, SuccessFactor factor,
                         unsigned threads) {
                 EngineConfig c{n_w, n_x, seed, factor, threads};
                 c.validate();
                 return c;
             }),
             py::arg("n_w") = 100000, py::arg("n_x") = 1000, py::arg("seed") = 20120101,
             py::arg("factor") = SuccessFactor::Indicator, py::arg("threads") = 0)
        .def_readwrite("n_w", &EngineConfig::n_w)
        .def_readwrite("n_x", &EngineConfig::n_x)
        .def_readwrite("seed", &EngineConfig::seed)
        .def_readwrite("factor", &EngineConfig::factor)
        .def_readwrite("threads", &EngineConfig::threads);

    py::class_<FrontierPoint>(m, "FrontierPoint")
        .def_readonly("m", &FrontierPoint::m)
        .def_readonly("capital", &FrontierPoint::capital)
        .def_readonly("success", &FrontierPoint::success)
        .def_readonly("capital_se", &FrontierPoint::capital_se)
        .def_readonly("success_se", &FrontierPoint::success_se)
        .def("__repr__", [](const FrontierPoint& p) {
            return repr_fields("FrontierPoint",
                                              {{"m", p.m}, {"capital", p.capital}, {"success", p.success}});
        });

    py::class_<CapitalSolution>(m, "CapitalSolution")
        .def_readonly("target", &CapitalSolution::target)
        .def_readonly("m_star", &CapitalSolution::m_star)
        .def_readonly("capital", &CapitalSolution::capital)
        .def_readonly("achieved", &CapitalSolution::achieved)
        .def_readonly("capital_se", &CapitalSolution::capital_se)
        .def_readonly("achieved_se", &CapitalSolution::achieved_se)
        .def_readonly("unconstrained", &CapitalSolution::unconstrained);

    py::class_<PayoffFunction>(m, "PayoffFunction")
        .def("__call__", &PayoffFunction::operator())
        .def_property_readonly("knots", &PayoffFunction::knots)
        .def_property_readonly("values", &PayoffFunction::values);

    py::class_<BacktestReport>(m, "BacktestReport")
        .def_readonly("n_paths", &BacktestReport::n_paths)
        .def_readonly("n_steps", &BacktestReport::n_steps)
        .def_readonly("initial_capital_used", &BacktestReport::initial_capital_used)
        .def_readonly("empirical_success", &BacktestReport::empirical_success)
        .def_readonly("success_se", &BacktestReport::success_se)
        .def_readonly("claim_success", &BacktestReport::claim_success)
        .def_readonly("mean_hedge_error", &BacktestReport::mean_hedge_error)
        .def_readonly("hedge_error_sd", &BacktestReport::hedge_error_sd);

    m.def("black_scholes_put", &black_scholes_put, py::arg("y0"), py::arg("k"), py::arg("sigma"), py::arg("t"));

    m.def(
        "sample_terminal",
        [](const MarketParams& p, std::size_t n, std::uint64_t seed) {
            std::vector<double> out;
            for (const auto& s : sample_terminal(p, n, seed)) out.push_back(s.w);
            return out;
        },
        py::arg("params"), py::arg("n"), py::arg("seed"));

    m.def(
        "density_p_over_q", [](const MarketParams& p, double w) { return density_p_over_q(p, {w}); },
        py::arg("params"), py::arg("w"));
    m.def(
        "g_indicator", [](const MarketParams& p, double w, double x) { return g_indicator(p, {w}, x); },
        py::arg("params"), py::arg("w"), py::arg("x"));
    m.def(
        "g_ratio", [](const MarketParams& p, double w, double x) { return g_ratio(p, {w}, x); }, py::arg("params"),
        py::arg("w"), py::arg("x"));

    m.def(
        "tangent_point",
        [](std::vector<double> grid, std::vector<double> values, double slope) {
            const auto r = tangent_point(TabulatedFunction::from_values(std::move(grid), std::move(values)), slope);
            return py::make_tuple(r.pi, r.g_at_pi, r.objective);
        },
        py::arg("grid"), py::arg("values"), py::arg("m"), "Returns (pi, g(pi), g(pi) - m pi).");

    m.def(
        "evaluate_slope",
        [](const MarketParams& p, const EngineConfig& c, double slope) {
            py::gil_scoped_release release;
            return evaluate_slope(p, c, slope);
        },
        py::arg("params"), py::arg("config"), py::arg("m"));
    m.def(
        "sweep",
        [](const MarketParams& p, const EngineConfig& c, const std::vector<double>& grid) {
            py::gil_scoped_release release;
            return sweep(p, c, grid);
        },
        py::arg("params"), py::arg("config"), py::arg("m_grid"));
    m.def(
        "solve_capital",
        [](const MarketParams& p, const EngineConfig& c, double target) {
            py::gil_scoped_release release;
            return solve_capital(p, c, target);
        },
        py::arg("params"), py::arg("config"), py::arg("target"));

    m.def(
        "build_payoff",
        [](const MarketParams& p, const EngineConfig& c, double slope) {
            py::gil_scoped_release release;
            SlopeAllocation allocation;
            Frontier(p, c).evaluate(slope, &allocation);
            return build_payoff(allocation.w, allocation.x_max, p.strike_k);
        },
        py::arg("params"), py::arg("config"), py::arg("m"), "Optimal claim of the engine at slope m.");
    m.def(
        "price_and_delta",
        [](const PayoffFunction& f, const MarketParams& p, double t, double x) {
            const auto r = price_and_delta(f, p, t, x);
            return py::make_tuple(r.value, r.delta);
        },
        py::arg("payoff"), py::arg("params"), py::arg("t"), py::arg("x"));
    m.def(
        "run_backtest",
        [](const PayoffFunction& f, const MarketParams& p, std::size_t n_paths, std::size_t n_steps,
           std::uint64_t seed) {
            py::gil_scoped_release release;
            return run_backtest(f, p, n_paths, n_steps, seed);
        },
        py::arg("payoff"), py::arg("params"), py::arg("n_paths"), py::arg("n_steps"), py::arg("seed"));
}

"""Quantile hedging of a put on a nontradable asset with a correlated tradable one."""

from ._core import (
    BacktestReport,
    CapitalSolution,
    EngineConfig,
    FrontierPoint,
    MarketParams,
    NumericalError,
    PayoffFunction,
    SuccessFactor,
    black_scholes_put,
    build_payoff,
    density_p_over_q,
    evaluate_slope,
    g_indicator,
    g_ratio,
    price_and_delta,
    run_backtest,
    sample_terminal,
    solve_capital,
    sweep,
    tangent_point,
)

__all__ = [
    "BacktestReport",
    "CapitalSolution",
    "EngineConfig",
    "FrontierPoint",
    "MarketParams",
    "NumericalError",
    "PayoffFunction",
    "SuccessFactor",
    "black_scholes_put",
    "build_payoff",
    "density_p_over_q",
    "evaluate_slope",
    "g_indicator",
    "g_ratio",
    "price_and_delta",
    "run_backtest",
    "sample_terminal",
    "solve_capital",
    "sweep",
    "tangent_point",
]

"""Laplace-domain solver for multi-term time-fractional Jeffreys-type equations."""

from ._core import (
    ConfigError,
    JeffreysParams,
    SymbolSet,
    build_plan,
    cgl_nodes,
    cheb_coeffs,
    invert,
    invert_waiting_time,
    msd_analytic,
    msd_monte_carlo,
    run_experiment,
    solve_pde1d,
    solve_pde2d,
    solve_scalar_example1,
    validate,
)

__all__ = [
    "ConfigError",
    "JeffreysParams",
    "SymbolSet",
    "build_plan",
    "cgl_nodes",
    "cheb_coeffs",
    "invert",
    "invert_waiting_time",
    "msd_analytic",
    "msd_monte_carlo",
    "run_experiment",
    "solve_pde1d",
    "solve_pde2d",
    "solve_scalar_example1",
    "validate",
]

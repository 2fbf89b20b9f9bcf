"""Solver and verifier for the coupled critical fractional-Laplacian system."""

from ._core import (
    CritsysError,
    DomainError,
    NumericalError,
    SystemParams,
    classify,
    continuation_branch,
    critical_exponent,
    energy_gap_vs_R,
    eval_F,
    find_k0_l0,
    gamma_threshold_a,
    gamma_threshold_b,
    least_energy,
    lprime_grid_min,
    lprime_min_closed_form,
    make_params,
    run_cli,
    sobolev_closed_form,
    sobolev_spectral,
    solve_tR_sR,
)

__all__ = [
    "CritsysError",
    "DomainError",
    "NumericalError",
    "SystemParams",
    "classify",
    "continuation_branch",
    "critical_exponent",
    "energy_gap_vs_R",
    "eval_F",
    "find_k0_l0",
    "gamma_threshold_a",
    "gamma_threshold_b",
    "least_energy",
    "lprime_grid_min",
    "lprime_min_closed_form",
    "make_params",
    "run_cli",
    "sobolev_closed_form",
    "sobolev_spectral",
    "solve_tR_sR",
]

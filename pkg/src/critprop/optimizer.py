"""Derivative-free maximization of the bound over the constraint surface.

The search runs in the unconstrained free coordinates of the polynomial
family (normalizations eliminated, not penalized) plus the rate R as a
final coordinate, so every candidate the simplex visits is a valid
mollifier configuration by construction.  Two grids are involved: a coarse
search grid for the many objective evaluations, and the start config's own
grid for the single confirming evaluation of the winner - reporting a
coarse-grid bound as the result would let the optimizer monetize
quadrature error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .kappa import BoundReport, InvalidAggregateError, evaluate_bound
from .mollifier import (
    ConfigError,
    GridSettings,
    MollifierConfig,
    from_free_params,
    to_free_params,
)

__all__ = ["OptimizationResult", "R_WINDOW", "optimize"]

R_WINDOW = (0.9, 1.6)
_SEARCH_GRID = GridSettings(nodes_low_dim=12, nodes_high_dim=10)
_BAD = 1e3  # objective value for infeasible candidates (finite, to keep the simplex sane)


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of one optimization run.

    ``trace`` records the search-grid bound each time the incumbent
    improved, as (evaluations used so far, bound); it is non-decreasing in
    the bound by construction.  ``best_bound`` is the confirming fine-grid
    value, re-evaluated from ``best_config`` immediately before return, and
    ``start_bound`` is the same confirm-grid evaluation of the start; the
    former never falls below the latter.
    """

    best_config: MollifierConfig
    best_bound: float
    start_bound: float
    iterations: int
    trace: tuple[tuple[int, float], ...]
    converged: bool


def _search_bound(cfg: MollifierConfig) -> BoundReport:
    # Exploratory candidates may produce slightly negative diagonal terms
    # through quadrature jitter; those warnings are the caller's business
    # only at confirmation time.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return evaluate_bound(cfg, refine=False)


def optimize(
    start: MollifierConfig,
    budget: int = 2000,
    grid_schedule: tuple[GridSettings, GridSettings] | None = None,
    *,
    seed: int = 0,
    restarts: int = 3,
    progress=None,
) -> OptimizationResult:
    """Maximize the bound from ``start`` within ``budget`` evaluations.

    Nelder-Mead over the free coordinates plus R, restarted ``restarts``
    times from the jittered incumbent.  R is kept inside R_WINDOW by a
    finite barrier.  ``grid_schedule`` is (search grid, confirm grid); the
    default searches coarse and confirms on the start's own grid.  The
    returned bound is never below the start's confirm-grid bound: if the
    search found nothing genuinely better, the start is returned with
    ``converged=False``.  Deterministic for fixed (start, budget, seed).

    ``progress``, if given, is called as progress(evals_used, report) with
    the search-grid report each time the incumbent improves.
    """
    if budget < 0:
        raise ValueError(f"budget must be nonnegative, got {budget}")
    search_grid, confirm_grid = grid_schedule or (_SEARCH_GRID, start.grid)
    mode = start.mode

    start_confirmed = evaluate_bound(start.with_grid(confirm_grid))
    x0 = np.append(to_free_params(start), start.R)

    evals = 0
    trace: list[tuple[int, float]] = []
    best_v: np.ndarray | None = None
    best_search = -np.inf

    def objective(v: np.ndarray) -> float:
        nonlocal evals, best_v, best_search
        if evals >= budget:
            return _BAD  # budget fence; the solver's maxfev stops it shortly
        evals += 1
        if not np.isfinite(v).all():
            return _BAD
        r = v[-1]
        lo, hi = R_WINDOW
        if not lo <= r <= hi:
            return _BAD + min(abs(r - lo), abs(r - hi))
        try:
            cfg = from_free_params(v[:-1], mode, R=r, grid=search_grid, strict=False)
            report = _search_bound(cfg)
        except (ConfigError, InvalidAggregateError):
            return _BAD
        if report.bound > best_search:
            best_search = report.bound
            best_v = v.copy()
            trace.append((evals, report.bound))
            if progress is not None:
                progress(evals, report)
        return -report.bound

    rng = np.random.default_rng(seed)
    x_init = x0.copy()
    for _ in range(1 + restarts):
        if evals >= budget:
            break
        minimize(
            objective,
            x_init,
            method="Nelder-Mead",
            options={
                "maxfev": budget - evals,
                "xatol": 1e-6,
                "fatol": 1e-10,
                "adaptive": True,
            },
        )
        incumbent = x0 if best_v is None else best_v
        x_init = incumbent + rng.normal(scale=1e-2, size=incumbent.shape)
        x_init[-1] = np.clip(x_init[-1], R_WINDOW[0] + 1e-3, R_WINDOW[1] - 1e-3)

    improved_in_search = bool(trace) and best_search > trace[0][1]
    if improved_in_search:
        candidate = from_free_params(
            best_v[:-1], mode, R=best_v[-1], grid=confirm_grid, strict=False
        )
        confirmed = evaluate_bound(candidate)
        if confirmed.bound >= start_confirmed.bound:
            return OptimizationResult(
                best_config=candidate,
                best_bound=confirmed.bound,
                start_bound=start_confirmed.bound,
                iterations=evals,
                trace=tuple(trace),
                converged=True,
            )

    return OptimizationResult(
        best_config=start.with_grid(confirm_grid),
        best_bound=start_confirmed.bound,
        start_bound=start_confirmed.bound,
        iterations=evals,
        trace=tuple(trace),
        converged=False,
    )

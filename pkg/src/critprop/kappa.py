"""From the moment aggregate to the zero-proportion bounds.

The aggregate c feeds the asymptotic lower bound 1 - log(c)/R for the
proportion of nontrivial zeros on the critical line (kappa mode) or, with a
linear Q, for the proportion that are critical and simple (kappa_star
mode).  The vanishing correction term of the underlying inequality is
dropped; reports therefore describe an asymptotic lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mollifier import MODE_KAPPA, MODE_KAPPA_STAR, MollifierConfig
from .terms import TermBreakdown, eval_all

__all__ = ["BoundReport", "InvalidAggregateError", "bound_from_terms", "evaluate_bound"]


class InvalidAggregateError(ArithmeticError):
    """The aggregate is not positive, so its logarithm is undefined."""


@dataclass(frozen=True)
class BoundReport:
    """The bound together with everything that produced it."""

    mode: str
    R: float
    c_total: float
    bound: float
    breakdown: TermBreakdown

    @property
    def max_refinement_delta(self) -> float:
        deltas = [
            tv.refinement_delta
            for tv in self.breakdown.as_dict().values()
            if tv.refinement_delta is not None
        ]
        return max(deltas) if deltas else float("nan")


def bound_from_terms(tb: TermBreakdown, R: float, mode: str) -> BoundReport:
    """bound = 1 - ln(c_total)/R, defined only for positive aggregates."""
    if mode not in (MODE_KAPPA, MODE_KAPPA_STAR):
        raise ValueError(f"unknown mode {mode!r}")
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    c_total = tb.c_total
    if not c_total > 0.0:
        raise InvalidAggregateError(f"aggregate {c_total} is not positive")
    bound = 1.0 - math.log(c_total) / R
    return BoundReport(mode=mode, R=R, c_total=c_total, bound=bound, breakdown=tb)


def evaluate_bound(cfg: MollifierConfig, *, refine: bool = True) -> BoundReport:
    """Evaluate all six constants for cfg and convert to the bound."""
    return bound_from_terms(eval_all(cfg, refine=refine), cfg.R, cfg.mode)

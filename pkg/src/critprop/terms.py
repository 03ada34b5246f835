"""The six constants of the mollified second moment.

Each constant is a prefactor times a prescribed mixed derivative, at zero,
of a parametric integral over the unit cube (or, for the cross term of the
first two pieces, a triangular prism).  The integrands are implemented
exactly as displayed in their source forms, redundant groupings included
("fidelity over elegance"): every factor below is one visible factor of the
corresponding display, and no algebraic simplification is applied.  The
oracle tests exist to catch transcription slips, and they can only do that
if this module does not editorialize.

Evaluation strategy: the integrand is built over batches of quadrature
nodes as a product of jets in the bracket variables (all exponential and
polynomial arguments are affine in those variables, so the closed-form jet
constructors apply).  The coefficient vectors are integrated and the mixed
derivative is extracted once from the integrated jet - by linearity this is
identical to integrating pointwise derivatives, and far cheaper.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.polynomial import polynomial as P

from . import jet as J
from .mollifier import MollifierConfig
from .quadrature import GridSpec, integrate_c12_region, integrate_cube

__all__ = [
    "TermValue",
    "TermBreakdown",
    "TERM_NAMES",
    "eval_c1",
    "eval_c2",
    "eval_c3",
    "eval_c12",
    "eval_c23",
    "eval_c31",
    "eval_term",
    "eval_all",
]

TERM_NAMES = ("c1", "c2", "c3", "c12", "c23", "c31")

# Relative tolerances against the independent finite-difference/Monte-Carlo
# oracles (scripts/make_oracles.py; frozen in tests/_oracle_frozen.py).  They
# scale with the derivative order the oracle has to difference: the plain
# double integral is known to 1e-4, the second/fourth-order terms to 1e-3,
# and the sixth/eighth-order terms to 1e-2.  The oracle's own sampling error
# is frozen alongside each value and added on top by the comparison tests.
ORACLE_REL_TOL = {
    "c1": 1e-4,
    "c12": 1e-3,
    "c2": 1e-3,
    "c31": 1e-3,
    "c23": 1e-2,
    "c3": 1e-2,
}

# Arguments fed to P1/P2''/P3 must stay inside [0,1] once the bracket
# variables are set to zero; the polynomials' zero-extension convention for
# negative arguments must never actually trigger.
_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class TermValue:
    """One constant: its value, grid-refinement delta, and node count."""

    value: float
    refinement_delta: float | None
    n_evals: int


@dataclass(frozen=True)
class TermBreakdown:
    """All six constants plus the aggregate they sum to."""

    c1: TermValue
    c2: TermValue
    c3: TermValue
    c12: TermValue
    c23: TermValue
    c31: TermValue

    @property
    def c_total(self) -> float:
        return (
            self.c1.value
            + self.c2.value
            + self.c3.value
            + 2.0 * self.c12.value
            + 2.0 * self.c23.value
            + 2.0 * self.c31.value
        )

    def as_dict(self) -> dict[str, TermValue]:
        return {name: getattr(self, name) for name in TERM_NAMES}


def _require_unit_range(term: str, what: str, values: np.ndarray) -> None:
    lo = float(values.min())
    hi = float(values.max())
    if lo < -_RANGE_SLACK or hi > 1.0 + _RANGE_SLACK:
        raise ValueError(
            f"{term}: {what} leaves [0,1] at zero bracket variables: [{lo}, {hi}]"
        )


# ---------------------------------------------------------------------------
# c1: the one-piece diagonal term.  No bracket variables at all:
#
#   c1 = P1(1)^2 + (1/theta1) int int e^{2Rt}
#            (Q(t) P1'(u) + theta1 Q'(t) P1(u) + theta1 R Q(t) P1(u))^2 dt du
# ---------------------------------------------------------------------------


def _c1_integrand(cfg: MollifierConfig):
    th1, R = cfg.theta1, cfg.R
    polys = cfg.polys

    def f(points):
        t, u = points
        q_t = P.polyval(t, polys.q_monomial)
        dq_t = P.polyval(t, polys.q_prime)
        p1_u = P.polyval(u, polys.p1_monomial)
        dp1_u = P.polyval(u, polys.p1_prime)
        core = q_t * dp1_u + th1 * dq_t * p1_u + th1 * R * q_t * p1_u
        return np.exp(2.0 * R * t) * core * core

    return f


# ---------------------------------------------------------------------------
# c12: first/second piece cross term.  Bracket variables (x1, x2), first
# derivatives in each; region t1, t2 >= 0, t1 + t2 <= u <= 1.
# ---------------------------------------------------------------------------


def _c12_integrand(cfg: MollifierConfig):
    shape = J.JetShape((1, 1))
    th1, th2, R = cfg.theta1, cfg.theta2, cfg.R
    polys = cfg.polys

    def f(points):
        t1, t2, u = points
        x1, x2 = J.affine_vars(2, t1.shape[0])

        expo = J.exp_affine(shape, R * (1.0 - th1 * (x1 - x2) + th2 * (t1 - t2)))

        q_left_arg = -th1 * x1 + th2 * t1
        q_right_arg = 1.0 + th1 * x2 - th2 * t2
        p1_arg = x1 + x2 + 1.0 - (th2 / th1) * (1.0 - u)
        _require_unit_range("c12", "P1 argument", p1_arg.const)

        p2dd_arg = u - t1 - t2
        _require_unit_range("c12", "P2'' argument", p2dd_arg)

        prod = J.mul(expo, J.compose_poly_affine(polys.q_monomial, shape, q_left_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_right_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p1_monomial, shape, p1_arg))
        scalar = (1.0 - u) * P.polyval(p2dd_arg, polys.p2_second)
        return J.scale(prod, scalar).coeffs

    return f, shape, (1, 1)


# ---------------------------------------------------------------------------
# c2: second-piece diagonal term.  Bracket variables (x1, x2), second
# derivatives in each; integral over [0,1]^4 in (t1, t2, t3, u).
# ---------------------------------------------------------------------------


def _c2_integrand(cfg: MollifierConfig):
    shape = J.JetShape((2, 2))
    th2, R = cfg.theta2, cfg.R
    polys = cfg.polys

    def f(points):
        t1, t2, t3, u = points
        x1, x2 = J.affine_vars(2, t1.shape[0])

        drift = x1 + x2 - (x1 + u) * t1 - (x2 + u) * t2
        one_plus = 1.0 + th2 * drift

        expo = J.exp_affine(shape, -th2 * R * drift + (2.0 * R * t3) * one_plus)

        q_first_arg = th2 * (-1.0 * x1 + (x2 + u) * t2) + t3 * one_plus
        q_second_arg = th2 * (-1.0 * x2 + (x1 + u) * t1) + t3 * one_plus

        p2dd_first = (x1 + u) * (1.0 - t1)
        p2dd_second = (x2 + u) * (1.0 - t2)
        _require_unit_range("c2", "first P2'' argument", p2dd_first.const)
        _require_unit_range("c2", "second P2'' argument", p2dd_second.const)

        prod = J.mul(expo, J.affine_jet(shape, one_plus))
        prod = J.mul(prod, J.affine_jet(shape, x1 + u))
        prod = J.mul(prod, J.affine_jet(shape, x2 + u))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_first_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_second_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p2_second, shape, p2dd_first))
        prod = J.mul(prod, J.compose_poly_affine(polys.p2_second, shape, p2dd_second))
        return J.scale(prod, (1.0 - u) ** 4).coeffs

    return f, shape, (2, 2)


# ---------------------------------------------------------------------------
# c3: third-piece diagonal term.  Bracket variables (x1..x4), second
# derivatives in each; integral over [0,1]^5 in (t1, t2, t3, t4, u).
# ---------------------------------------------------------------------------


def _c3_integrand(cfg: MollifierConfig):
    shape = J.JetShape((2, 2, 2, 2))
    th3, R = cfg.theta3, cfg.R
    polys = cfg.polys

    def f(points):
        t1, t2, t3, t4, u = points
        x1, x2, x3, x4 = J.affine_vars(4, t1.shape[0])

        first_len = 1.0 + th3 * (x1 + x3)
        second_len = 1.0 + th3 * (x2 + x4)
        swap_first = t1 + th3 * (-1.0 * x1 + x2 + (x1 + x3) * t1)
        swap_second = t2 + th3 * (x3 - x4 + (x2 + x4) * t2)

        expo = J.exp_affine(
            shape,
            -th3 * R * (x2 + x3)
            + (R * t1 * (1.0 - t4)) * first_len
            + (R * t2 * (1.0 - t3)) * second_len
            + (R * t3) * swap_first
            + (R * t4) * swap_second,
        )

        bracket_a = (
            t1 - t2 + th3 * (-1.0 * x1 + x2 + (x1 + x3) * t1 - (x2 + x4) * t2)
        )
        bracket_b = (
            t1 - t2 + th3 * (-1.0 * x3 + x4 + (x1 + x3) * t1 - (x2 + x4) * t2)
        )

        q_first_arg = -th3 * x2 + (t2 * (1.0 - t3)) * second_len + t3 * swap_first
        q_second_arg = -th3 * x3 + (t1 * (1.0 - t4)) * first_len + t4 * swap_second

        p3_first = x1 + x2 + u
        p3_second = x3 + x4 + u
        _require_unit_range("c3", "first P3 argument", p3_first.const)
        _require_unit_range("c3", "second P3 argument", p3_second.const)

        prod = J.mul(expo, J.affine_jet(shape, bracket_a))
        prod = J.mul(prod, J.affine_jet(shape, bracket_b))
        prod = J.mul(prod, J.affine_jet(shape, first_len))
        prod = J.mul(prod, J.affine_jet(shape, second_len))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_first_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_second_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p3_monomial, shape, p3_first))
        prod = J.mul(prod, J.compose_poly_affine(polys.p3_monomial, shape, p3_second))
        return J.scale(prod, (1.0 - u) ** 3).coeffs

    return f, shape, (2, 2, 2, 2)


# ---------------------------------------------------------------------------
# c23: second/third piece cross term.  Bracket variables (x1, x2, x3),
# second derivatives in each; integral over [0,1]^5.  The display mixes the
# groupings t3*(1+t4) and (1-t4) in the exponent; both are kept as written.
# ---------------------------------------------------------------------------


def _c23_integrand(cfg: MollifierConfig):
    shape = J.JetShape((2, 2, 2))
    th2, th3, R = cfg.theta2, cfg.theta3, cfg.R
    polys = cfg.polys

    def f(points):
        t1, t2, t3, t4, u = points
        x1, x2, x3 = J.affine_vars(3, t1.shape[0])

        # the recurring building blocks, named once, spelled as displayed
        span = th2 * (1.0 + x1) - th3 * (1.0 - u)
        head = 1.0 + th2 * x1 + th3 * x2
        tail = head - (t1 * t2) * span
        skew = th3 * (x2 - x3) - (t1 * (2.0 * t2 - 1.0)) * span

        expo = J.exp_affine(
            shape,
            -R * (th2 * x1 + th3 * x2)
            + (R * t1 * t2 * (1.0 - t3 - t3 * t4)) * span
            + (R * t3 * (1.0 + t4)) * head
            + (R * (1.0 - t4)) * skew,
        )

        bracket = -th3 * (x2 - x3) + (t1 * (2.0 * t2 - 1.0)) * span + t3 * tail

        window = x1 + 1.0 - (th3 / th2) * (1.0 - u)

        q_first_arg = (
            -th3 * x2
            + (t1 * t2 * (1.0 - t3 * t4)) * span
            + (t3 * t4) * head
            + (1.0 - t4) * skew
        )
        q_second_arg = -th2 * x1 + t3 * tail

        p2dd_arg = window * (1.0 - t1)
        p3_arg = x2 + x3 + u
        _require_unit_range("c23", "P2'' argument", p2dd_arg.const)
        _require_unit_range("c23", "P3 argument", p3_arg.const)

        prod = J.mul(expo, J.affine_jet(shape, bracket))
        prod = J.mul(prod, J.affine_jet(shape, tail))
        prod = J.mul(prod, J.mul(J.affine_jet(shape, window), J.affine_jet(shape, window)))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_first_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_second_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p2_second, shape, p2dd_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p3_monomial, shape, p3_arg))
        return J.scale(prod, t1 * (1.0 - u) ** 3).coeffs

    return f, shape, (2, 2, 2)


# ---------------------------------------------------------------------------
# c31: third/first piece cross term.  Bracket variables (x1, x2, x3) with
# orders (1, 1, 2); integral over [0,1]^3 in (t1, t2, u).
# ---------------------------------------------------------------------------


def _c31_integrand(cfg: MollifierConfig):
    shape = J.JetShape((1, 1, 2))
    th1, th3, R = cfg.theta1, cfg.theta3, cfg.R
    polys = cfg.polys

    def f(points):
        t1, t2, u = points
        x1, x2, x3 = J.affine_vars(3, t1.shape[0])

        carrier = 1.0 + th1 * x1 + th3 * x3

        expo = J.exp_affine(
            shape,
            -R * (th1 * x2 + th3 * x3)
            + (R * t1 * (1.0 + t2)) * carrier
            - th1 * R * t2 * (x1 - x2),
        )

        bracket = -th1 * (x1 - x2) + t1 * carrier

        q_first_arg = -th1 * x2 + (t1 * t2) * carrier - th1 * t2 * (x1 - x2)
        q_second_arg = -th3 * x3 + t1 * carrier

        p1_arg = x1 + x2 + 1.0 - (th3 / th1) * (1.0 - u)
        p3_arg = x3 + u
        _require_unit_range("c31", "P1 argument", p1_arg.const)
        _require_unit_range("c31", "P3 argument", p3_arg.const)

        prod = J.mul(expo, J.affine_jet(shape, bracket))
        prod = J.mul(prod, J.affine_jet(shape, carrier))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_first_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.q_monomial, shape, q_second_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p1_monomial, shape, p1_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p3_monomial, shape, p3_arg))
        return J.scale(prod, 1.0 - u).coeffs

    return f, shape, (1, 1, 2)


# ---------------------------------------------------------------------------
# dispatch table and drivers
# ---------------------------------------------------------------------------


def _prefactors(cfg: MollifierConfig) -> dict[str, float]:
    th1, th2, th3 = cfg.theta1, cfg.theta2, cfg.theta3
    return {
        "c1": 1.0 / th1,
        "c2": 2.0 / (3.0 * th2),
        "c3": 1.0 / (12.0 * th3 ** 4),
        "c12": 4.0 * th2 ** 2 / th1 ** 2,
        "c23": 2.0 / (3.0 * th2 ** 2),
        "c31": 1.0 / th1 ** 2,
    }


_TERM_DIMS = {"c1": 2, "c2": 4, "c3": 5, "c12": 3, "c23": 5, "c31": 3}
_JET_BUILDERS = {
    "c2": _c2_integrand,
    "c3": _c3_integrand,
    "c12": _c12_integrand,
    "c23": _c23_integrand,
    "c31": _c31_integrand,
}


def eval_term(cfg: MollifierConfig, name: str, *, refine: bool = True) -> TermValue:
    """Evaluate one constant on the grid the config assigns to it."""
    if name not in TERM_NAMES:
        raise ValueError(f"unknown term {name!r}")
    dims = _TERM_DIMS[name]
    spec = GridSpec(dims, cfg.grid.nodes_for(name, dims))
    prefactor = _prefactors(cfg)[name]

    if name == "c1":
        res = integrate_cube(_c1_integrand(cfg), spec, refine=refine)
        base = cfg.polys.p1_at_1 ** 2
        value = base + prefactor * res.value
        delta = None if res.refinement_delta is None else prefactor * abs(
            res.value - res.coarse_value
        )
        return TermValue(value, delta, res.n_evals)

    f, shape, orders = _JET_BUILDERS[name](cfg)
    integrate = integrate_c12_region if name == "c12" else integrate_cube
    res = integrate(f, spec, refine=refine)
    value = prefactor * J.extract(J.Jet(shape, res.value), orders)
    delta = None
    if res.refinement_delta is not None:
        coarse = prefactor * J.extract(J.Jet(shape, res.coarse_value), orders)
        delta = abs(value - coarse)
    return TermValue(value, delta, res.n_evals)


def eval_c1(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c1").value


def eval_c2(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c2").value


def eval_c3(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c3").value


def eval_c12(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c12").value


def eval_c23(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c23").value


def eval_c31(cfg: MollifierConfig) -> float:
    return eval_term(cfg, "c31").value


def eval_all(cfg: MollifierConfig, *, refine: bool = True) -> TermBreakdown:
    """All six constants.  Emits a warning (not an error) if a diagonal
    term comes out negative beyond its refinement delta; that is not
    expected for square terms but is not a stated impossibility either."""
    values = {name: eval_term(cfg, name, refine=refine) for name in TERM_NAMES}
    for diag in ("c2", "c3"):
        tv = values[diag]
        slack = (tv.refinement_delta or 0.0) + 1e-15
        if tv.value < -slack:
            warnings.warn(
                f"{diag} = {tv.value} is negative beyond its grid delta {tv.refinement_delta}",
                RuntimeWarning,
                stacklevel=2,
            )
    return TermBreakdown(**values)

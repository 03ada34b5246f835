"""Machine checks of the structural identities behind the term evaluators.

The six constants are produced by a chain of exact rewrites: a scalar
integral formula that turns differences of exponentials into unit-interval
integrals, a partial-fraction split of paired resolvent denominators, and a
polynomial differential operator in two scaled shift variables that reduces
the shifted three-one cross term to the working one.  Each rewrite is
checked numerically here, independently of the production evaluators, so a
transcription slip in either pipeline shows up as a large, grid-independent
residual.

Shifts are handled in scaled form throughout: a shift s paired with a
logarithmic weight w contributes e^{s*w}, which removes the large asymptotic
parameter from the statements entirely and makes them exact identities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jet as J
from .mollifier import MollifierConfig
from .quadrature import GridSpec, integrate_cube
from .terms import eval_term

__all__ = [
    "ShiftVector",
    "check_int_identity",
    "check_partial_fraction",
    "check_operator_reduction_c31",
]

_SHIFT_CAP = 10.0


@dataclass(frozen=True)
class ShiftVector:
    """Scaled shifts of the moment integrals (order-one numbers).

    Three shifts cover the cross-term families; the optional fourth belongs
    to the four-shift diagonal family.
    """

    a: float
    b: float
    c: float
    d: float = 0.0

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"shifts must be finite, got {vals}")
        worst = max(abs(v) for v in vals)
        if worst > _SHIFT_CAP:
            raise ValueError(
                f"scaled shifts must satisfy |shift| <= {_SHIFT_CAP}, got {worst}"
            )


def check_int_identity(z_log: float, s: float, grid: GridSpec) -> float:
    """Residual of (1 - e^(-s*z_log))/s = z_log * integral_0^1 e^(-s*z_log*t) dt.

    The left side is evaluated in closed form (continued to s = 0 by its
    limit z_log), the right side by quadrature on ``grid``.
    """
    if grid.dims != 1:
        raise ValueError("the identity integrates over a single variable")
    closed = z_log if s == 0.0 else -np.expm1(-s * z_log) / s

    def f(points):
        return np.exp(-s * z_log * points[0])

    quad = integrate_cube(f, grid, refine=False)
    return abs(closed - z_log * quad.value)


def check_partial_fraction(a: float, b: float, c: float) -> float:
    """Residual of 1/((a+c)(b+c)) = 1/((a+c)(b-a)) + 1/((a-b)(b+c))."""
    d1, d2, d3 = a + c, b + c, b - a
    if min(abs(d1), abs(d2), abs(d3)) <= 1e-6:
        raise ValueError("denominators too close to the singular set")
    lhs = 1.0 / (d1 * d2)
    rhs = 1.0 / (d1 * d3) + 1.0 / ((a - b) * d2)
    return abs(lhs - rhs)


def _shifted_c31_jet(cfg: MollifierConfig, shape: J.JetShape, spec: GridSpec) -> J.Jet:
    """Quadrature of the shifted three-one integrand.

    Jet variables are (x1, x2, x3, b, c): the three bracket variables at
    their usual orders (1, 1, 2) plus the second and third scaled shifts as
    variables of order deg Q around the base point (0, -R, -R) fixed by the
    reduction.  The first shift is pinned at zero before differentiation, so
    it never needs a jet slot.  The exponent is bilinear (shift times
    bracket-affine), hence built with one jet product per shift and
    exponentiated by the generic truncated series.
    """
    th1, th3 = cfg.theta1, cfg.theta3
    polys = cfg.polys
    base = ShiftVector(0.0, -cfg.R, -cfg.R)

    def f(points):
        t1, t2, u = points
        n = t1.shape[0]
        x1, x2, x3, _, _ = J.affine_vars(5, n)

        carrier = 1.0 + th1 * x1 + th3 * x3
        swap = -th1 * (x1 - x2) + t1 * carrier

        b_jet = J.variable(shape, 3, np.full(n, base.b))
        c_jet = J.variable(shape, 4, np.full(n, base.c))
        expo = J.exp(
            J.add(
                J.mul(b_jet, J.affine_jet(shape, th1 * x2 - t2 * swap)),
                J.mul(c_jet, J.affine_jet(shape, th3 * x3 - t1 * carrier)),
            )
        )

        p1_arg = x1 + x2 + 1.0 - (th3 / th1) * (1.0 - u)
        p3_arg = x3 + u

        prod = J.mul(expo, J.affine_jet(shape, swap))
        prod = J.mul(prod, J.affine_jet(shape, carrier))
        prod = J.mul(prod, J.compose_poly_affine(polys.p1_monomial, shape, p1_arg))
        prod = J.mul(prod, J.compose_poly_affine(polys.p3_monomial, shape, p3_arg))
        return J.scale(prod, 1.0 - u).coeffs

    res = integrate_cube(f, spec, refine=False)
    return J.Jet(shape, res.value)


def check_operator_reduction_c31(
    cfg: MollifierConfig, derivative_order_cap: int = 5
) -> float:
    """Rebuild the three-one constant from its shifted parent.

    Applies Q(-d/db) Q(-d/dc) to the shifted integral at the base point
    b = c = -R (with the first shift already set to zero) and compares with
    the direct evaluator.  Returns the relative residual, or the absolute
    one when the direct value is too small to divide by.

    The two routes share quadrature nodes, and the operator commutes with
    the integral, so agreement is limited only by arithmetic roundoff; any
    grid-independent excess indicates a transcription error in one of the
    two independently coded integrands.
    """
    dq = cfg.polys.q_degree
    if dq > derivative_order_cap:
        raise ValueError(
            f"Q degree {dq} exceeds the derivative-order cap {derivative_order_cap}"
        )
    shape = J.JetShape((1, 1, 2, max(1, dq), max(1, dq)))
    spec = GridSpec(3, cfg.grid.nodes_for("c31", 3))

    shifted = _shifted_c31_jet(cfg, shape, spec)
    q = cfg.polys.q_monomial
    via_operator = 0.0
    for i in range(dq + 1):
        for j in range(dq + 1):
            if q[i] == 0.0 or q[j] == 0.0:
                continue
            sign = -1.0 if (i + j) % 2 else 1.0
            via_operator += q[i] * q[j] * sign * J.extract(shifted, (1, 1, 2, i, j))
    via_operator /= cfg.theta1 ** 2

    direct = eval_term(cfg, "c31", refine=False).value
    gap = abs(via_operator - direct)
    if abs(direct) < 1e-9:
        return gap
    return gap / abs(direct)

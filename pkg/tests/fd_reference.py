"""Finite-difference reference for mixed partial derivatives.

Central differences with one Richardson step, evaluated in 60-digit
mpmath arithmetic.  The digit count is not decoration: an order-d tensor
stencil divides by h^d, so rounding costs roughly 4^v * eps / h^d of the
function's magnitude (v variables), which for the eighth-order cases at
the default step eats 26 of those 60 digits.  What remains is far below
the comparison thresholds, leaving pure O(h^4) truncation.  The
differencing itself shares nothing with the jet implementation; the
random-factor generator below builds both sides of each comparison.
"""

from __future__ import annotations

import itertools

import mpmath as mp
import numpy as np

from critprop import jet as J


def _stencil(order, step):
    if order == 0:
        return ((step * 0, mp.mpf(1)),)
    if order == 1:
        return ((-step, -1 / (2 * step)), (step, 1 / (2 * step)))
    if order == 2:
        w = 1 / (step * step)
        return ((-step, w), (step * 0, -2 * w), (step, w))
    raise ValueError(f"unsupported derivative order {order}")


def mixed_derivative(f, base, orders, h=5e-3, dps=60):
    """d^|orders| f / dx^orders at `base`, by Richardson-extrapolated differences.

    f takes a tuple of mpf coordinates and must return something mp.mpf
    accepts; base is a sequence of floats; orders gives the per-variable
    derivative order (0, 1 or 2 each).
    """
    if len(base) != len(orders):
        raise ValueError("base and orders must have matching lengths")
    with mp.workdps(dps):
        centre = [mp.mpf(b) for b in base]

        def tensor(step):
            total = mp.mpf(0)
            for combo in itertools.product(*(_stencil(o, step) for o in orders)):
                pt = tuple(c + off for c, (off, _) in zip(centre, combo))
                weight = mp.mpf(1)
                for _, w in combo:
                    weight *= w
                total += weight * mp.mpf(f(pt))
            return total

        coarse = tensor(mp.mpf(h))
        fine = tensor(mp.mpf(h) / 2)
        return float((4 * fine - coarse) / 3)


def random_smooth_factor(rng, orders):
    """Random exp(affine) * poly(affine) factor, as a jet and a scalar twin.

    Returns (jet, f): the jet carries the factor's Taylor data in the
    offset variables, f evaluates the same factor at numeric offsets
    (mpmath scalars welcome).  The shape mirrors the factors the moment
    integrands are built from; coefficients are bounded away from zero so
    every mixed partial stays well above the comparison threshold.
    """
    dims = len(orders)
    shape = J.JetShape(tuple(orders))

    def signs(k):
        return rng.choice((-1.0, 1.0), size=k)

    a0 = float(rng.uniform(-0.5, 0.5))
    a = rng.uniform(0.3, 1.0, dims) * signs(dims)
    b0 = float(rng.uniform(1.5, 2.5))
    b = rng.uniform(0.1, 0.3, dims) * signs(dims)
    poly = rng.uniform(0.2, 1.0, int(rng.integers(2, 6)))

    fe, fp = a0, b0
    for i, x in enumerate(J.affine_vars(dims, 1)):
        fe = fe + float(a[i]) * x
        fp = fp + float(b[i]) * x
    jet = J.mul(J.exp_affine(shape, fe), J.compose_poly_affine(poly, shape, fp))

    def f(pt):
        za = a0 + sum(float(ai) * pi for ai, pi in zip(a, pt))
        zb = b0 + sum(float(bi) * pi for bi, pi in zip(b, pt))
        acc = mp.mpf(0)
        for c in poly[::-1]:
            acc = acc * zb + float(c)
        return mp.exp(za) * acc

    return jet, f


def compare_factor_to_fd(jet, f, orders):
    """Worst relative deviation between jet partials and differenced ones,
    over every multi-index the jet shape carries."""
    worst = 0.0
    zero = (0.0,) * len(orders)
    for alpha in itertools.product(*(range(o + 1) for o in orders)):
        got = float(np.asarray(J.extract(jet, alpha)).reshape(()))
        want = mixed_derivative(f, zero, alpha)
        worst = max(worst, abs(got - want) / max(abs(want), 1e-9))
    return worst

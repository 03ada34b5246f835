#!/usr/bin/env python3
"""Regenerate the frozen oracle values in tests/_oracle_frozen.py.

Every moment constant is recomputed here from its integral representation
using machinery deliberately disjoint from the package: plain scalar
arithmetic instead of jets, central finite differences (one Richardson
step) for the bracket-variable derivatives, and scrambled-Sobol averages
instead of Gauss-Legendre grids.  Agreement with the engine therefore
checks the integrand transcriptions, the Taylor-coefficient extraction
and the cube/region quadrature all at once.

Numerical notes, since the constants are small and the derivatives high:

* Finite differences of order d at step h lose roughly eps * |f| / h^d to
  rounding.  Orders up to six fit comfortably in 80-bit longdouble at the
  steps used below.  The eighth-order term is run at step 1e-2, where even
  longdouble would drown (256 * eps / h^8 ~ 0.3 |f|), so that one integrand
  is evaluated in 30-digit mpmath arithmetic, point by point.
* Each stencil point reuses the same Sobol stream (common random numbers),
  so the quadrature error applies to the differenced integrand directly
  instead of being amplified by 1/h^d.
* Estimates are averaged over 8 independent scrambles; the spread gives
  the standard error that the comparison tests add to their tolerance.
* The first scramble is also run with steps halved; the difference between
  the two Richardson values is recorded as a truncation estimate.

Run `python scripts/make_oracles.py --pilot` for a quick feasibility table
and `python scripts/make_oracles.py --write` for the full regeneration
(roughly 20-40 minutes single core, dominated by the mpmath term).
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
import time
from pathlib import Path

import numpy as np
from scipy.stats import qmc

LONG = np.longdouble

# Reference configuration: the published zero-proportion optimum.
THETA1 = 4.0 / 7.0
THETA2 = 0.5
THETA3 = 0.25
R = 1.26

P1 = (0.83651, 0.09758, -0.29393, 0.73372, -0.3753)  # coefficients of x^1..x^5
P2 = (0.0237, -0.00744, 0.00174)                     # x^3..x^5
P3 = (0.00155, -0.00013)                             # x^4..x^5
QB = (0.49068, 0.61077, -0.14199, 0.04054)           # basis 1, w, w^3, w^5; w = 1-2x

BASE_SEED = 20260815


# ---------------------------------------------------------------------------
# Polynomials, written to accept numpy arrays and mpmath scalars alike.
# ---------------------------------------------------------------------------


def _horner(y, coeffs):
    """Evaluate a polynomial given coefficients from highest degree down."""
    acc = y * 0 + coeffs[0]
    for c in coeffs[1:]:
        acc = acc * y + c
    return acc


def p1_val(y):
    return _horner(y, (P1[4], P1[3], P1[2], P1[1], P1[0], 0.0))


def p1_der(y):
    return _horner(y, (5 * P1[4], 4 * P1[3], 3 * P1[2], 2 * P1[1], P1[0]))


def p2_dd(y):
    return _horner(y, (20 * P2[2], 12 * P2[1], 6 * P2[0], 0.0))


def p3_val(y):
    return _horner(y, (P3[1], P3[0], 0.0, 0.0, 0.0, 0.0))


def q_val(y):
    w = 1.0 - 2.0 * y
    w2 = w * w
    return QB[0] + w * (QB[1] + w2 * (QB[2] + w2 * QB[3]))


def q_der(y):
    w = 1.0 - 2.0 * y
    w2 = w * w
    return -2.0 * (QB[1] + w2 * (3.0 * QB[2] + w2 * (5.0 * QB[3])))


# ---------------------------------------------------------------------------
# Integrands.  x is the tuple of bracket offsets (numeric, not jets), the
# remaining arguments are the integration variables.
# ---------------------------------------------------------------------------


def f_c1(t, u):
    core = (q_val(t) * p1_der(u)
            + THETA1 * q_der(t) * p1_val(u)
            + THETA1 * R * q_val(t) * p1_val(u))
    return np.exp(2.0 * R * t) * core * core


def f_c12(x, t1, t2, u, exp=np.exp):
    x1, x2 = x
    e = exp(R * (1.0 - THETA1 * (x1 - x2) + THETA2 * (t1 - t2)))
    return (e * (1.0 - u)
            * q_val(-THETA1 * x1 + THETA2 * t1)
            * q_val(1.0 + THETA1 * x2 - THETA2 * t2)
            * p1_val(x1 + x2 + 1.0 - (THETA2 / THETA1) * (1.0 - u))
            * p2_dd(u - t1 - t2))


def f_c12_region(x, s, v, u, exp=np.exp):
    """f_c12 over {t1, t2 >= 0, t1 + t2 <= u} via t1 = u s v, t2 = u s (1 - v)."""
    t1 = u * s * v
    t2 = u * s * (1.0 - v)
    return f_c12(x, t1, t2, u, exp=exp) * u * u * s


def f_c2(x, t1, t2, t3, u, exp=np.exp):
    x1, x2 = x
    drift = x1 + x2 - t1 * (x1 + u) - t2 * (x2 + u)
    onep = 1.0 + THETA2 * drift
    e = exp(-THETA2 * R * drift + 2.0 * R * t3 * onep)
    qa = THETA2 * (-x1 + t2 * (x2 + u)) + t3 * onep
    qb = THETA2 * (-x2 + t1 * (x1 + u)) + t3 * onep
    return (e * onep * (x1 + u) * (x2 + u) * (1.0 - u) ** 4
            * q_val(qa) * q_val(qb)
            * p2_dd((x1 + u) * (1.0 - t1)) * p2_dd((x2 + u) * (1.0 - t2)))


def f_c3(x, t1, t2, t3, t4, u, exp=np.exp):
    x1, x2, x3, x4 = x
    ca = 1.0 + THETA3 * (x1 + x3)
    cb = 1.0 + THETA3 * (x2 + x4)
    g1 = t1 + THETA3 * (-x1 + x2 + (x1 + x3) * t1)
    g2 = t2 + THETA3 * (x3 - x4 + (x2 + x4) * t2)
    e = exp(-THETA3 * R * (x2 + x3)
            + R * t1 * (1.0 - t4) * ca + R * t2 * (1.0 - t3) * cb
            + R * t3 * g1 + R * t4 * g2)
    br1 = t1 - t2 + THETA3 * (-x1 + x2 + (x1 + x3) * t1 - (x2 + x4) * t2)
    br2 = t1 - t2 + THETA3 * (-x3 + x4 + (x1 + x3) * t1 - (x2 + x4) * t2)
    qa = -THETA3 * x2 + t2 * (1.0 - t3) * cb + t3 * g1
    qb = -THETA3 * x3 + t1 * (1.0 - t4) * ca + t4 * g2
    return (e * br1 * br2 * ca * cb * (1.0 - u) ** 3
            * q_val(qa) * q_val(qb)
            * p3_val(x1 + x2 + u) * p3_val(x3 + x4 + u))


def f_c23(x, t1, t2, t3, t4, u, exp=np.exp):
    x1, x2, x3 = x
    dv = THETA2 * (1.0 + x1) - THETA3 * (1.0 - u)
    base = 1.0 + THETA2 * x1 + THETA3 * x2
    inner = base - t1 * t2 * dv
    tail = THETA3 * (x2 - x3) - t1 * (2.0 * t2 - 1.0) * dv
    e = exp(-R * (THETA2 * x1 + THETA3 * x2)
            + R * t1 * t2 * (1.0 - t3 - t3 * t4) * dv
            + R * t3 * (1.0 + t4) * base + R * (1.0 - t4) * tail)
    br = -tail + t3 * inner
    peg = x1 + 1.0 - (THETA3 / THETA2) * (1.0 - u)
    qa = (-THETA3 * x2 + t1 * t2 * (1.0 - t3 * t4) * dv
          + t3 * t4 * base + (1.0 - t4) * tail)
    qb = -THETA2 * x1 + t3 * inner
    return (e * br * inner * t1 * peg * peg * (1.0 - u) ** 3
            * q_val(qa) * q_val(qb)
            * p2_dd(peg * (1.0 - t1)) * p3_val(x2 + x3 + u))


def f_c31(x, t1, t2, u, exp=np.exp):
    x1, x2, x3 = x
    ca = 1.0 + THETA1 * x1 + THETA3 * x3
    e = exp(-R * (THETA1 * x2 + THETA3 * x3)
            + R * t1 * (1.0 + t2) * ca - THETA1 * R * t2 * (x1 - x2))
    br = -THETA1 * (x1 - x2) + t1 * ca
    qa = -THETA1 * x2 + t1 * t2 * ca - THETA1 * t2 * (x1 - x2)
    qb = -THETA3 * x3 + t1 * ca
    return (e * br * ca * (1.0 - u)
            * q_val(qa) * q_val(qb)
            * p1_val(x1 + x2 + 1.0 - (THETA3 / THETA1) * (1.0 - u))
            * p3_val(x3 + u))


# ---------------------------------------------------------------------------
# Central differences with one Richardson step.
# ---------------------------------------------------------------------------


def _stencil_1d(order, h):
    if order == 1:
        return ((-h, -0.5 / h), (h, 0.5 / h))
    if order == 2:
        hh = 1.0 / (h * h)
        return ((-h, hh), (h * 0, -2.0 * hh), (h, hh))
    raise ValueError(f"unsupported derivative order {order}")


def richardson_stencil(orders, h):
    """Merged point -> weight map for (4 D(h/2) - D(h)) / 3."""
    merged: dict[tuple, object] = {}
    for level_h, level_w in ((h, -1.0 / 3.0), (h / 2, 4.0 / 3.0)):
        per_var = [_stencil_1d(o, level_h) for o in orders]
        for combo in itertools.product(*per_var):
            pt = tuple(c[0] for c in combo)
            w = level_w
            for c in combo:
                w = w * c[1]
            merged[pt] = merged.get(pt, 0.0) + w
    return merged


# ---------------------------------------------------------------------------
# Scrambled-Sobol estimation.
# ---------------------------------------------------------------------------


def _sobol_chunks(dims, m, seed, chunk=1 << 18):
    pts = qmc.Sobol(d=dims, scramble=True, seed=seed).random_base2(m)
    for lo in range(0, pts.shape[0], chunk):
        yield pts[lo:lo + chunk]


def qmc_mean(f, dims, m, seed, dtype=LONG):
    """Plain scrambled-Sobol average of f(t1, ..., tdims)."""
    total = dtype(0.0)
    n = 0
    for block in _sobol_chunks(dims, m, seed):
        cols = [block[:, j].astype(dtype) for j in range(dims)]
        total = total + np.sum(f(*cols), dtype=dtype)
        n += block.shape[0]
    return float(total / dtype(n))


def qmc_fd_mean(f, dims, orders, h, m, seed, dtype=LONG):
    """Scrambled-Sobol average of the Richardson-extrapolated derivative."""
    stencil = richardson_stencil(orders, dtype(h))
    sums = {pt: dtype(0.0) for pt in stencil}
    n = 0
    for block in _sobol_chunks(dims, m, seed):
        cols = [block[:, j].astype(dtype) for j in range(dims)]
        for pt in stencil:
            sums[pt] = sums[pt] + np.sum(f(pt, *cols), dtype=dtype)
        n += block.shape[0]
    acc = dtype(0.0)
    for pt, w in stencil.items():
        acc = acc + w * sums[pt]
    return float(acc / dtype(n))


def qmc_fd_mean_mp(f, dims, orders, h, m, seed, dps):
    """Same as qmc_fd_mean but with every point evaluated in mpmath."""
    import mpmath as mp

    with mp.workdps(dps):
        stencil = richardson_stencil(orders, mp.mpf(h))
        pts = list(stencil)
        acc = {pt: mp.mpf(0) for pt in pts}
        sob = qmc.Sobol(d=dims, scramble=True, seed=seed)
        sample = sob.random_base2(m)
        for row in sample:
            tvars = [mp.mpf(float(r)) for r in row]
            for pt in pts:
                acc[pt] += f(pt, *tvars, exp=mp.exp)
        total = mp.mpf(0)
        for pt in pts:
            total += stencil[pt] * acc[pt]
        return float(total / len(sample))


# ---------------------------------------------------------------------------
# Term drivers.  Each returns (value, stderr, details) at the term level,
# prefactor included.
# ---------------------------------------------------------------------------

N_SCRAMBLES = 8


def _scramble_stats(samples, prefactor):
    vals = np.asarray(samples, dtype=float) * prefactor
    value = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    return value, stderr


def run_c1(m, seed):
    samples = [qmc_mean(f_c1, 2, m, seed + k, dtype=np.float64)
               for k in range(N_SCRAMBLES)]
    value, stderr = _scramble_stats(samples, 1.0 / THETA1)
    head = p1_val(1.0) ** 2
    return head + value, stderr, {"n": N_SCRAMBLES << m, "h": None, "trunc": None}


def _run_fd_term(f, dims, orders, h, prefactor, m, seed, mp_dps=None):
    runner = (
        (lambda s, hh: qmc_fd_mean_mp(f, dims, orders, hh, m, s, mp_dps))
        if mp_dps else
        (lambda s, hh: qmc_fd_mean(f, dims, orders, hh, m, s))
    )
    samples = [runner(seed + k, h) for k in range(N_SCRAMBLES)]
    value, stderr = _scramble_stats(samples, prefactor)
    # Truncation check: halved steps on the first scramble only.
    finer = runner(seed, h / 2)
    trunc = abs(finer - samples[0]) * abs(prefactor)
    return value, stderr, {"n": N_SCRAMBLES << m, "h": h, "trunc": trunc}


def run_c12(m, seed):
    return _run_fd_term(f_c12_region, 3, (1, 1), 0.02,
                        4.0 * THETA2 ** 2 / THETA1 ** 2, m, seed)


def run_c2(m, seed):
    return _run_fd_term(f_c2, 4, (2, 2), 0.02, 2.0 / (3.0 * THETA2), m, seed)


def run_c3(m, seed, dps=30):
    return _run_fd_term(f_c3, 5, (2, 2, 2, 2), 0.01, 1.0 / (12.0 * THETA3 ** 4),
                        m, seed, mp_dps=dps)


def run_c23(m, seed):
    return _run_fd_term(f_c23, 5, (2, 2, 2), 0.04, 2.0 / (3.0 * THETA2 ** 2), m, seed)


def run_c31(m, seed):
    return _run_fd_term(f_c31, 3, (1, 1, 2), 0.02, 1.0 / THETA1 ** 2, m, seed)


# (runner, production m, pilot m); m is log2 of samples per scramble.
TERMS = {
    "c1": (run_c1, 24, 14),
    "c12": (run_c12, 21, 14),
    "c2": (run_c2, 21, 14),
    "c3": (run_c3, 13, 8),
    "c23": (run_c23, 21, 14),
    "c31": (run_c31, 21, 14),
}

FROZEN_PATH = Path(__file__).resolve().parent.parent / "tests" / "_oracle_frozen.py"

HEADER = '''"""Frozen oracle values generated by scripts/make_oracles.py.

Independent recomputation of the moment constants at the published
zero-proportion configuration: scalar arithmetic, central differences
with one Richardson step, scrambled-Sobol integration.  `stderr` is the
spread over 8 independent scrambles, `trunc` the observed shift when all
steps are halved, `n` the total sample count.  Regenerate with
`python scripts/make_oracles.py --write`; do not edit by hand.
"""

FROZEN = '''


def emit(results, meta):
    lines = ["{"]
    for name, (value, stderr, det) in results.items():
        lines.append(f"    {name!r}: {{")
        lines.append(f"        'value': {value!r},")
        lines.append(f"        'stderr': {stderr!r},")
        lines.append(f"        'n': {det['n']!r},")
        lines.append(f"        'h': {det['h']!r},")
        lines.append(f"        'trunc': {det['trunc']!r},")
        lines.append("    },")
    lines.append("}")
    body = HEADER + "\n".join(lines) + "\n\nMETA = {\n"
    for key, val in meta.items():
        body += f"    {key!r}: {val!r},\n"
    body += "}\n"
    FROZEN_PATH.write_text(body)
    print(f"wrote {FROZEN_PATH}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--term", action="append", choices=sorted(TERMS),
                    help="restrict to the given term(s)")
    ap.add_argument("--pilot", action="store_true",
                    help="small sample counts, for timing and error estimates")
    ap.add_argument("--write", action="store_true",
                    help="rewrite tests/_oracle_frozen.py (needs all six terms)")
    ap.add_argument("--seed", type=int, default=BASE_SEED)
    ns = ap.parse_args(argv)

    names = ns.term or sorted(TERMS)
    if ns.write and set(names) != set(TERMS):
        ap.error("--write requires all six terms")

    results = {}
    t_start = time.time()
    for name in names:
        runner, m_full, m_pilot = TERMS[name]
        m = m_pilot if ns.pilot else m_full
        t0 = time.time()
        value, stderr, det = runner(m, ns.seed)
        dt = time.time() - t0
        results[name] = (value, stderr, det)
        trunc = det["trunc"]
        print(f"{name:>4}: {value:+.10f}  stderr {stderr:.2e}  "
              f"trunc {trunc if trunc is None else f'{trunc:.2e}'}  "
              f"n {det['n']}  [{dt:.1f} s]")
        sys.stdout.flush()

    if ns.write:
        meta = {
            "seed": ns.seed,
            "scrambles": N_SCRAMBLES,
            "runtime_s": round(time.time() - t_start, 1),
        }
        emit(results, meta)


if __name__ == "__main__":
    main()

"""Deterministic tensor-product Gauss-Legendre quadrature on [0,1]^k, k <= 5.

Integrands are smooth (entire) in every variable, so Gauss-Legendre converges
spectrally and 16-24 nodes per dimension are enough for the target
tolerances.  Error estimates come from re-integrating on a roughly half-size
grid rather than from embedded rules.

Determinism: nodes are enumerated in C order and consumed in fixed-size
chunks; each chunk is reduced with an unoptimized einsum and the chunk
partials are combined by a fixed pairwise tree.  Worker counts only affect
parallelism *inside* integrand evaluation (each node independent), so
results are bit-identical regardless of threading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "QuadResult",
    "NonFiniteIntegrandError",
    "integrate_cube",
    "integrate_c12_region",
]

# Fixed chunk length: part of the deterministic reduction order, so it is a
# module constant rather than a tunable (changing it changes the summation
# tree, hence the last couple of bits).
_CHUNK = 32768


class NonFiniteIntegrandError(ArithmeticError):
    """An integrand produced nan/inf; carries the offending node coordinates."""

    def __init__(self, point):
        self.point = tuple(float(p) for p in point)
        super().__init__(f"non-finite integrand value at node {self.point}")


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: `nodes_per_dim` Gauss-Legendre nodes in each of `dims` axes."""

    dims: int
    nodes_per_dim: int
    rule: str = "gauss-legendre"

    def __post_init__(self):
        if not 1 <= self.dims <= 5:
            raise ValueError(f"dims must be 1..5, got {self.dims}")
        if self.nodes_per_dim < 2:
            raise ValueError("nodes_per_dim must be >= 2")
        if self.rule != "gauss-legendre":
            raise ValueError(f"unsupported rule {self.rule!r}")

    @property
    def total_nodes(self) -> int:
        return self.nodes_per_dim ** self.dims

    def coarser(self) -> "GridSpec":
        """The half-resolution grid used for the refinement estimate."""
        return GridSpec(self.dims, max(4, self.nodes_per_dim // 2), self.rule)


@dataclass(frozen=True)
class QuadResult:
    """Integral value plus the coarse-grid comparison.

    value/coarse_value are floats for scalar integrands and coefficient
    vectors for jet-valued ones; refinement_delta is the max absolute
    difference between the two resolutions (None when refinement was not
    requested).  n_evals counts fine-grid integrand evaluations only;
    n_evals_coarse the extra ones spent on the estimate.
    """

    value: float | np.ndarray
    refinement_delta: float | None
    coarse_value: float | np.ndarray | None
    n_evals: int
    n_evals_coarse: int = 0


@lru_cache(maxsize=None)
def _unit_gauss_legendre(n: int):
    """Nodes and weights on [0,1]; weights sum to 1 exactly up to rounding."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _pairwise(parts: list):
    while len(parts) > 1:
        merged = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _sum_over_grid(f, dims: int, n: int):
    x, w = _unit_gauss_legendre(n)
    total = n ** dims
    grid_shape = (n,) * dims
    parts = []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        multi = np.unravel_index(flat, grid_shape)
        points = np.stack([x[m] for m in multi], axis=0)
        weights = w[multi[0]].copy()
        for m in multi[1:]:
            weights *= w[m]
        values = np.asarray(f(points), dtype=float)
        if values.shape[:1] != (points.shape[1],):
            raise ValueError(
                f"integrand returned shape {values.shape} for {points.shape[1]} nodes"
            )
        finite = np.isfinite(values)
        if not finite.all():
            bad = int(np.nonzero(~finite.reshape(values.shape[0], -1).all(axis=1))[0][0])
            raise NonFiniteIntegrandError(points[:, bad])
        parts.append(np.einsum("n,n...->...", weights, values, optimize=False))
    out = _pairwise(parts)
    return (float(out) if out.ndim == 0 else out), total


def integrate_cube(f, spec: GridSpec, *, refine: bool = True) -> QuadResult:
    """Integrate f over [0,1]^dims.

    f receives a (dims, n) array of node coordinates and must return one
    value per node: shape (n,) for scalar integrands or (n, m) for
    vector-valued ones (jet coefficient rows).  Non-finite values raise
    NonFiniteIntegrandError with the node location.
    """
    value, evals = _sum_over_grid(f, spec.dims, spec.nodes_per_dim)
    if not refine:
        return QuadResult(value, None, None, evals)
    coarse, coarse_evals = _sum_over_grid(f, spec.dims, spec.coarser().nodes_per_dim)
    delta = float(np.max(np.abs(np.asarray(value) - np.asarray(coarse))))
    return QuadResult(value, delta, coarse, evals, coarse_evals)


def integrate_c12_region(f, spec: GridSpec, *, refine: bool = True) -> QuadResult:
    """Integrate f(t1, t2, u) over {t1, t2 >= 0, t1 + t2 <= u <= 1}.

    Substituting t1 = u*v1, t2 = u*v2*(1 - v1) maps the region onto the unit
    cube in (v1, v2, u) with Jacobian u^2 * (1 - v1), keeping the integrand
    smooth (no indicator masking, which would wreck spectral convergence).
    """
    if spec.dims != 3:
        raise ValueError("the triangular-prism region is three-dimensional")

    def g(points):
        v1, v2, u = points
        t1 = u * v1
        t2 = u * v2 * (1.0 - v1)
        jac = u * u * (1.0 - v1)
        vals = np.asarray(f(np.stack([t1, t2, u])), dtype=float)
        return vals * jac.reshape((-1,) + (1,) * (vals.ndim - 1))

    return integrate_cube(g, spec, refine=refine)

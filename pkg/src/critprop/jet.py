"""Dense truncated multivariate Taylor (jet) arithmetic.

A jet records the Taylor coefficients at 0 of a smooth function of a few
formal variables, truncated independently per variable.  Jet arithmetic is
exact on polynomials whose per-variable degree stays within the truncation
orders, which is exactly what the moment integrands need: build each
integrand factor as a jet over the quadrature nodes, multiply, integrate the
coefficient vectors, and read the mixed partial derivative off once at the
end.

Coefficient layout
------------------
Coefficients live in a flat float64 array whose last axis enumerates
multi-indices in C order over the per-variable ranges ``0..max_order_v``.
A jet may carry a single coefficient vector (shape ``(size,)``) or one
vector per quadrature node (shape ``(n_nodes, size)``); every operation
broadcasts over the leading axes.  Node-batched arrays are kept C-contiguous
so the product kernel streams each node's coefficients from cache.

The product kernel is the hot spot: it walks a precomputed table of
multi-index pairs whose componentwise sum stays within the truncation, and
is JIT-compiled with an outer parallel loop over nodes only.  Each output
row depends on one node, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

__all__ = [
    "JetShape",
    "Jet",
    "AffineForm",
    "affine_vars",
    "variable",
    "constant",
    "add",
    "sub",
    "mul",
    "scale",
    "exp",
    "compose_poly",
    "extract",
    "affine_jet",
    "exp_affine",
    "compose_poly_affine",
    "jet_product",
]


@dataclass(frozen=True)
class JetShape:
    """Truncation signature: one maximum derivative order per variable."""

    max_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(m) for m in self.max_orders)
        if len(orders) < 1:
            raise ValueError("a jet needs at least one variable")
        if any(m < 1 for m in orders):
            raise ValueError(f"per-variable order must be >= 1, got {orders}")
        object.__setattr__(self, "max_orders", orders)

    @property
    def var_count(self) -> int:
        return len(self.max_orders)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m + 1 for m in self.max_orders)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def total_order(self) -> int:
        """Sum of per-variable orders; (a - a(0))**(total_order+1) == 0."""
        return sum(self.max_orders)

    @property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def flat_index(self, orders) -> int:
        orders = tuple(int(o) for o in orders)
        if len(orders) != self.var_count:
            raise ValueError(f"expected {self.var_count} orders, got {orders}")
        for o, m in zip(orders, self.max_orders):
            if o < 0 or o > m:
                raise ValueError(f"orders {orders} exceed shape {self.max_orders}")
        return int(np.ravel_multi_index(orders, self.dims))


class _Tables:
    """Precomputed index machinery for one shape (cached per max_orders)."""

    __slots__ = ("exponents", "pair_a", "pair_b", "pair_out", "factorial", "total_degree")

    def __init__(self, max_orders: tuple[int, ...]):
        dims = tuple(m + 1 for m in max_orders)
        size = math.prod(dims)
        exps = np.stack(np.unravel_index(np.arange(size), dims), axis=1)
        summed = exps[:, None, :] + exps[None, :, :]
        ok = (summed <= np.asarray(max_orders)).all(axis=2)
        ia, ib = np.nonzero(ok)
        iout = np.ravel_multi_index(tuple(summed[ia, ib].T), dims)
        self.exponents = exps
        self.pair_a = np.ascontiguousarray(ia, dtype=np.int64)
        self.pair_b = np.ascontiguousarray(ib, dtype=np.int64)
        self.pair_out = np.ascontiguousarray(iout, dtype=np.int64)
        self.factorial = np.array(
            [math.prod(math.factorial(int(e)) for e in row) for row in exps], dtype=float
        )
        self.total_degree = exps.sum(axis=1)


@lru_cache(maxsize=None)
def _tables(max_orders: tuple[int, ...]) -> _Tables:
    return _Tables(max_orders)


@numba.njit(parallel=True, cache=True, fastmath=False)
def _mul_kernel(a, b, pair_a, pair_b, pair_out, out):  # pragma: no cover - jit
    n_pairs = pair_a.shape[0]
    for n in numba.prange(a.shape[0]):
        for p in range(n_pairs):
            out[n, pair_out[p]] += a[n, pair_a[p]] * b[n, pair_b[p]]


class Jet:
    """Immutable truncated Taylor expansion; see module docstring for layout."""

    __slots__ = ("shape", "coeffs")

    # ndarray operands must defer to the reflected methods below instead of
    # broadcasting elementwise over this object.
    __array_ufunc__ = None

    def __init__(self, shape: JetShape, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0 or coeffs.shape[-1] != shape.size:
            raise ValueError(
                f"coefficient array with last axis {shape.size} required, got {coeffs.shape}"
            )
        if coeffs.ndim > 2:
            raise ValueError("jets support at most one batch axis")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("jets are immutable")

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def __repr__(self):
        return f"Jet(orders={self.shape.max_orders}, batch={self.batch_shape})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return add(-self, other)

    def __neg__(self):
        return Jet(self.shape, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__


def constant(shape: JetShape, value) -> Jet:
    value = np.asarray(value, dtype=float)
    out = np.zeros(value.shape + (shape.size,))
    out[..., 0] = value
    return Jet(shape, out)


def variable(shape: JetShape, v: int, base=0.0) -> Jet:
    """The jet of ``base + x_v``."""
    if not 0 <= v < shape.var_count:
        raise IndexError(f"variable index {v} out of range for {shape.max_orders}")
    base = np.asarray(base, dtype=float)
    out = np.zeros(base.shape + (shape.size,))
    out[..., 0] = base
    out[..., shape.strides[v]] = 1.0
    return Jet(shape, out)


def _check_shapes(a: Jet, b: Jet) -> JetShape:
    if a.shape != b.shape:
        raise ValueError(f"jet shape mismatch: {a.shape.max_orders} vs {b.shape.max_orders}")
    return a.shape


def add(a: Jet, b) -> Jet:
    if isinstance(b, Jet):
        _check_shapes(a, b)
        return Jet(a.shape, a.coeffs + b.coeffs)
    out = a.coeffs.copy()
    out[..., 0] += b
    return Jet(a.shape, out)


def sub(a: Jet, b) -> Jet:
    if isinstance(b, Jet):
        _check_shapes(a, b)
        return Jet(a.shape, a.coeffs - b.coeffs)
    return add(a, -b)


def scale(a: Jet, s) -> Jet:
    s = np.asarray(s, dtype=float)
    if s.ndim:
        s = s[..., None]
    return Jet(a.shape, a.coeffs * s)


def mul(a: Jet, b: Jet) -> Jet:
    """Truncated product; multi-indices beyond the shape are discarded."""
    shape = _check_shapes(a, b)
    size = shape.size
    batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
    av = np.ascontiguousarray(np.broadcast_to(a.coeffs, batch + (size,))).reshape(-1, size)
    bv = np.ascontiguousarray(np.broadcast_to(b.coeffs, batch + (size,))).reshape(-1, size)
    t = _tables(shape.max_orders)
    out = np.zeros_like(av)
    _mul_kernel(av, bv, t.pair_a, t.pair_b, t.pair_out, out)
    return Jet(shape, out.reshape(batch + (size,)))


def jet_product(jets) -> Jet:
    """Left-to-right product of a non-empty sequence of jets."""
    jets = list(jets)
    if not jets:
        raise ValueError("empty product")
    acc = jets[0]
    for j in jets[1:]:
        acc = mul(acc, j)
    return acc


def exp(a: Jet) -> Jet:
    """exp of a jet via the exact truncated series.

    With u = a - a(0), u**(K+1) vanishes under truncation for
    K = total_order, so exp(a) = exp(a(0)) * sum_{k<=K} u**k / k! holds
    without any tolerance.  Evaluated in Horner form (K products).
    """
    shape = a.shape
    a0 = a.coeffs[..., 0].copy()
    u_coeffs = a.coeffs.copy()
    u_coeffs[..., 0] = 0.0
    u = Jet(shape, u_coeffs)
    acc = constant(shape, np.ones(a.batch_shape))
    for k in range(shape.total_order, 0, -1):
        acc = mul(u, acc)
        c = acc.coeffs / k
        c[..., 0] += 1.0
        acc = Jet(shape, c)
    return Jet(shape, acc.coeffs * np.exp(a0)[..., None])


def compose_poly(p, a: Jet) -> Jet:
    """p(a) for a univariate polynomial p given by monomial coefficients.

    ``p[k]`` is the coefficient of x**k.  Plain Horner over jet arithmetic.
    """
    c = np.atleast_1d(np.asarray(p, dtype=float))
    acc = constant(a.shape, np.full(a.batch_shape, c[-1]))
    for coef in c[-2::-1]:
        nxt = mul(acc, a).coeffs
        nxt[..., 0] += coef
        acc = Jet(a.shape, nxt)
    return acc


def extract(a: Jet, orders):
    """Mixed partial derivative at 0: coefficient times the factorials."""
    flat = a.shape.flat_index(orders)
    fact = _tables(a.shape.max_orders).factorial[flat]
    out = a.coeffs[..., flat] * fact
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Affine forms and closed-form jet constructors.
#
# Every exponential argument and every polynomial argument in the six moment
# integrands is affine in the jet variables (the node-dependent coefficients
# carry all the nonlinearity), so the hot paths never need the generic
# series/Horner routes above.  For an affine argument c + sum_v l_v x_v the
# Taylor coefficients have closed forms:
#
#   exp:   coeff[k] = exp(c) * prod_v l_v**k_v / k_v!
#   p( ):  coeff[k] = p^(|k|)(c) * prod_v l_v**k_v / k_v!
#
# built below by a per-variable recurrence (one multiply per coefficient).
# The generic routes remain the reference implementations; property tests
# pin the two against each other.
# ---------------------------------------------------------------------------


class AffineForm:
    """const + sum_v lin[..., v] * x_v with array-valued coefficients.

    Supports +, -, and multiplication by constants (scalars or node arrays).
    Multiplying two affine forms is deliberately an error: such products must
    be formed at the jet level where truncation is explicit.
    """

    __slots__ = ("const", "lin")

    __array_ufunc__ = None  # keep `ndarray * form` routing to __rmul__

    def __init__(self, const, lin):
        self.const = np.asarray(const, dtype=float)
        self.lin = np.asarray(lin, dtype=float)
        if self.lin.ndim == 0:
            raise ValueError("lin must have a trailing variable axis")

    @property
    def var_count(self) -> int:
        return self.lin.shape[-1]

    def _coerce(self, other) -> "AffineForm":
        if isinstance(other, AffineForm):
            if other.var_count != self.var_count:
                raise ValueError("affine forms over different variable counts")
            return other
        zeros = np.zeros(self.var_count)
        return AffineForm(np.asarray(other, dtype=float), zeros)

    def __add__(self, other):
        o = self._coerce(other)
        return AffineForm(self.const + o.const, self.lin + o.lin)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return AffineForm(self.const - o.const, self.lin - o.lin)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AffineForm(-self.const, -self.lin)

    def __mul__(self, other):
        if isinstance(other, AffineForm):
            raise TypeError(
                "product of two affine forms is not affine; lift to jets first"
            )
        w = np.asarray(other, dtype=float)
        return AffineForm(self.const * w, self.lin * w[..., None])

    __rmul__ = __mul__

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return np.broadcast_shapes(self.const.shape, self.lin.shape[:-1])


def affine_vars(var_count: int, n_nodes: int | None = None) -> list[AffineForm]:
    """One affine form per variable, optionally batched over n_nodes."""
    out = []
    for v in range(var_count):
        lin = np.zeros((n_nodes, var_count) if n_nodes else (var_count,))
        lin[..., v] = 1.0
        out.append(AffineForm(np.zeros(n_nodes) if n_nodes else 0.0, lin))
    return out


def _monomial_recurrence(shape: JetShape, form: AffineForm, seed: np.ndarray) -> np.ndarray:
    """Fill coeff[k] = seed * prod_v lin_v**k_v / k_v! by per-variable slabs."""
    if form.var_count != shape.var_count:
        raise ValueError("affine form and jet shape disagree on variable count")
    batch = form.batch_shape
    nb = len(batch)
    out = np.zeros(batch + (shape.size,))
    view = out.reshape(batch + shape.dims)
    view[(...,) + (0,) * shape.var_count] = seed
    for v in range(shape.var_count):
        slab = np.moveaxis(view, nb + v, -1)
        lv = np.broadcast_to(form.lin[..., v], batch).reshape(batch + (1,) * (shape.var_count - 1))
        for o in range(1, shape.dims[v]):
            slab[..., o] = slab[..., o - 1] * (lv / o)
    return out


def affine_jet(shape: JetShape, form: AffineForm) -> Jet:
    """The affine form itself as a jet (exact; higher coefficients zero)."""
    if form.var_count != shape.var_count:
        raise ValueError("affine form and jet shape disagree on variable count")
    batch = form.batch_shape
    out = np.zeros(batch + (shape.size,))
    out[..., 0] = form.const
    for v, stride in enumerate(shape.strides):
        out[..., stride] = form.lin[..., v]
    return Jet(shape, out)


def exp_affine(shape: JetShape, form: AffineForm) -> Jet:
    """exp(affine form) via the closed-form coefficients."""
    seed = np.exp(np.broadcast_to(form.const, form.batch_shape))
    return Jet(shape, _monomial_recurrence(shape, form, seed))


def compose_poly_affine(p, shape: JetShape, form: AffineForm) -> Jet:
    """p(affine form) via the derivative ladder p^(m)(const)."""
    c = np.atleast_1d(np.asarray(p, dtype=float))
    batch = form.batch_shape
    base = np.broadcast_to(form.const, batch)
    ladder = []
    for _ in range(shape.total_order + 1):
        ladder.append(np.polynomial.polynomial.polyval(base, c))
        c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    stacked = np.stack(ladder, axis=-1)
    monomials = _monomial_recurrence(shape, form, np.ones(batch))
    degrees = _tables(shape.max_orders).total_degree
    return Jet(shape, monomials * stacked[..., degrees])

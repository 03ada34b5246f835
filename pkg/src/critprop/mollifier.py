"""The free data of the three-piece mollifier.

Three pieces, each with its own length exponent theta_i and shaping
polynomial: the first piece carries P1 with P1(0) = 0, the second P2
vanishing to third order, the third P3 vanishing to fourth order, plus a
polynomial Q with Q(0) = 1 that shapes the completed-zeta factor.  The
normalization P1(1) + P3(1) = 1 ties the pieces together.

Two operating modes share the machinery.  "kappa" targets the proportion of
zeros on the critical line and lets Q range over the odd-reflection basis
{1, (1-2x), (1-2x)^3, (1-2x)^5}; "kappa_star" targets simple zeros, where Q
must be linear (1 - q1*x).

The exponents are fixed at the largest admissible values (4/7, 1/2, 1/4):
the constants depend on them continuously and the reported bounds are only
attained in that limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "ConfigError",
    "GridSettings",
    "PolynomialSpec",
    "MollifierConfig",
    "MODE_KAPPA",
    "MODE_KAPPA_STAR",
    "THETA_SUPREMA",
    "paper_kappa_config",
    "paper_kappa_star_config",
    "from_free_params",
    "to_free_params",
    "free_param_count",
]

MODE_KAPPA = "kappa"
MODE_KAPPA_STAR = "kappa_star"

THETA_SUPREMA = (4.0 / 7.0, 1.0 / 2.0, 1.0 / 4.0)

_DEFAULT_R = {MODE_KAPPA: 1.26, MODE_KAPPA_STAR: 1.12}

# Published reference coefficient sets (the two headline configurations).
_KAPPA_DATA = {
    "R": 1.26,
    "p1": (0.83651, 0.09758, -0.29393, 0.73372, -0.3753),
    "p2": (0.0237, -0.00744, 0.00174),
    "p3": (0.00155, -0.00013),
    "q": (0.49068, 0.61077, -0.14199, 0.04054),
}
_KAPPA_STAR_DATA = {
    "R": 1.12,
    "p1": (0.82653, 0.02626, -0.00774, 0.34803, -0.19371),
    "p2": (0.0324, -0.00759, 0.00742),
    "p3": (0.00094, -0.00031),
    "q": (1.03232,),
}


class ConfigError(ValueError):
    """A configuration violates the structural constraints."""


@dataclass(frozen=True)
class GridSettings:
    """Quadrature resolution knobs, per integral dimensionality.

    Integrals over at most three variables use nodes_low_dim Gauss-Legendre
    nodes per axis; the 4- and 5-dimensional ones use nodes_high_dim.
    per_term entries like ("c3", 12) override a single constant.
    """

    nodes_low_dim: int = 24
    nodes_high_dim: int = 16
    per_term: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if isinstance(self.per_term, dict):
            object.__setattr__(self, "per_term", tuple(sorted(self.per_term.items())))
        if self.nodes_low_dim < 2 or self.nodes_high_dim < 2:
            raise ConfigError("node counts must be >= 2")

    def nodes_for(self, term: str, dims: int) -> int:
        for name, n in self.per_term:
            if name == term:
                return n
        return self.nodes_low_dim if dims <= 3 else self.nodes_high_dim

    def rescaled(self, factor: float) -> "GridSettings":
        scale = lambda n: max(2, round(n * factor))
        return GridSettings(
            scale(self.nodes_low_dim),
            scale(self.nodes_high_dim),
            tuple((k, scale(n)) for k, n in self.per_term),
        )


def _poly_value(coeffs_low_to_high) -> float:
    return float(sum(coeffs_low_to_high))


@dataclass(frozen=True)
class PolynomialSpec:
    """The four shaping polynomials with their structural constraints.

    p1_coeffs: coefficients of x^1..x^5 (constant term is structurally 0).
    p2_coeffs: coefficients of x^3..x^5.
    p3_coeffs: coefficients of x^4..x^5.
    q_coeffs:  kappa mode: coefficients on {1, (1-2x), (1-2x)^3, (1-2x)^5};
               kappa_star mode: the single slope q1 of Q(x) = 1 - q1*x.
    """

    p1_coeffs: tuple[float, ...]
    p2_coeffs: tuple[float, ...]
    p3_coeffs: tuple[float, ...]
    q_coeffs: tuple[float, ...]
    q_mode: str

    def __post_init__(self):
        as_tuple = lambda v: tuple(float(c) for c in np.atleast_1d(v))
        for name, width in (("p1_coeffs", 5), ("p2_coeffs", 3), ("p3_coeffs", 2)):
            vals = as_tuple(getattr(self, name))
            if len(vals) != width:
                raise ConfigError(f"{name} needs {width} coefficients, got {len(vals)}")
            if not all(np.isfinite(vals)):
                raise ConfigError(f"{name} has non-finite entries")
            object.__setattr__(self, name, vals)
        q = as_tuple(self.q_coeffs)
        if self.q_mode == MODE_KAPPA:
            if len(q) != 4:
                raise ConfigError("kappa mode uses 4 basis coefficients for Q")
        elif self.q_mode == MODE_KAPPA_STAR:
            if len(q) != 1:
                raise ConfigError("kappa_star mode uses a single slope for Q")
        else:
            raise ConfigError(f"unknown q_mode {self.q_mode!r}")
        if not all(np.isfinite(q)):
            raise ConfigError("q_coeffs has non-finite entries")
        object.__setattr__(self, "q_coeffs", q)

        norm = self.p1_at_1 + self.p3_at_1
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"P1(1) + P3(1) = {norm!r}, must be 1")
        if abs(self.q_at_0 - 1.0) > 1e-12:
            raise ConfigError(f"Q(0) = {self.q_at_0!r}, must be 1")

    # --- derived monomial arrays (index = power of x) ---------------------

    @cached_property
    def p1_monomial(self) -> np.ndarray:
        return np.array([0.0, *self.p1_coeffs])

    @cached_property
    def p1_prime(self) -> np.ndarray:
        return P.polyder(self.p1_monomial)

    @cached_property
    def p2_monomial(self) -> np.ndarray:
        return np.array([0.0, 0.0, 0.0, *self.p2_coeffs])

    @cached_property
    def p2_second(self) -> np.ndarray:
        """P2'' computed symbolically from the coefficients."""
        return P.polyder(self.p2_monomial, 2)

    @cached_property
    def p3_monomial(self) -> np.ndarray:
        return np.array([0.0, 0.0, 0.0, 0.0, *self.p3_coeffs])

    @cached_property
    def q_monomial(self) -> np.ndarray:
        if self.q_mode == MODE_KAPPA_STAR:
            return np.array([1.0, -self.q_coeffs[0]])
        k0, k1, k3, k5 = self.q_coeffs
        acc = np.zeros(6)
        acc[0] = k0
        for coeff, power in ((k1, 1), (k3, 3), (k5, 5)):
            term = P.polypow([1.0, -2.0], power) * coeff
            acc[: len(term)] += term
        return acc

    @cached_property
    def q_prime(self) -> np.ndarray:
        return P.polyder(self.q_monomial)

    # --- constraint handles ------------------------------------------------

    @property
    def p1_at_1(self) -> float:
        return _poly_value(self.p1_coeffs)

    @property
    def p3_at_1(self) -> float:
        return _poly_value(self.p3_coeffs)

    @property
    def q_at_0(self) -> float:
        if self.q_mode == MODE_KAPPA_STAR:
            return 1.0
        return _poly_value(self.q_coeffs)

    @property
    def q_degree(self) -> int:
        nz = np.nonzero(self.q_monomial)[0]
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class MollifierConfig:
    """Everything a term evaluation needs: exponents, R, polynomials, grids.

    strict=True additionally enforces the engine's sensible-R window
    [0.5, 2.5]; exploratory/degenerate setups (tests drive R toward 0) can
    opt out, but R must always be nonnegative and finite.
    """

    theta1: float
    theta2: float
    theta3: float
    R: float
    polys: PolynomialSpec
    grid: GridSettings = field(default_factory=GridSettings)
    mode: str = MODE_KAPPA
    strict: bool = True

    def __post_init__(self):
        t1, t2, t3 = self.theta1, self.theta2, self.theta3
        if not (0.0 < t3 < t2 < t1 < 1.0):
            raise ConfigError(f"need 0 < theta3 < theta2 < theta1 < 1, got {(t1, t2, t3)}")
        sup1, sup2, sup3 = THETA_SUPREMA
        if t1 > sup1 + 1e-15 or t2 > sup2 + 1e-15 or t3 > sup3 + 1e-15:
            raise ConfigError(f"thetas exceed admissible caps {THETA_SUPREMA}")
        if not np.isfinite(self.R) or self.R < 0.0:
            raise ConfigError(f"R must be nonnegative, got {self.R}")
        if self.strict and not (0.5 <= self.R <= 2.5):
            raise ConfigError(f"R = {self.R} outside the engine window [0.5, 2.5]")
        if self.mode != self.polys.q_mode:
            raise ConfigError(f"config mode {self.mode!r} != polynomial mode {self.polys.q_mode!r}")
        if self.mode == MODE_KAPPA_STAR and self.polys.q_degree > 1:
            raise ConfigError("kappa_star mode requires a linear Q")

    def with_grid(self, grid: GridSettings) -> "MollifierConfig":
        return replace(self, grid=grid)


def paper_kappa_config(grid: GridSettings | None = None) -> MollifierConfig:
    """Published reference configuration for the on-line-zeros bound."""
    d = _KAPPA_DATA
    polys = PolynomialSpec(d["p1"], d["p2"], d["p3"], d["q"], MODE_KAPPA)
    return MollifierConfig(*THETA_SUPREMA, d["R"], polys, grid or GridSettings(), MODE_KAPPA)


def paper_kappa_star_config(grid: GridSettings | None = None) -> MollifierConfig:
    """Published reference configuration for the simple-zeros bound."""
    d = _KAPPA_STAR_DATA
    polys = PolynomialSpec(d["p1"], d["p2"], d["p3"], d["q"], MODE_KAPPA_STAR)
    return MollifierConfig(
        *THETA_SUPREMA, d["R"], polys, grid or GridSettings(), MODE_KAPPA_STAR
    )


# ---------------------------------------------------------------------------
# Free-coordinate parametrization of the constraint surface.
#
# The optimizer works in unconstrained coordinates; the two normalizations
# are eliminated rather than penalized: a1 = 1 - (a2+..+a5) - (c4+c5) makes
# P1(1) + P3(1) = 1 automatic, and Q's constant basis coefficient is
# 1 - (k1+k3+k5) in kappa mode (the kappa_star slope is unconstrained since
# Q(0) = 1 holds structurally there).  Exponents stay at their suprema.
# ---------------------------------------------------------------------------


def free_param_count(mode: str) -> int:
    if mode == MODE_KAPPA:
        return 12  # a2..a5, b3..b5, c4, c5, k1, k3, k5
    if mode == MODE_KAPPA_STAR:
        return 10  # a2..a5, b3..b5, c4, c5, q1
    raise ConfigError(f"unknown mode {mode!r}")


def from_free_params(
    v,
    mode: str,
    *,
    R: float | None = None,
    grid: GridSettings | None = None,
    strict: bool = True,
) -> MollifierConfig:
    v = np.asarray(v, dtype=float).ravel()
    if v.size != free_param_count(mode):
        raise ConfigError(f"{mode} mode expects {free_param_count(mode)} free params, got {v.size}")
    if not np.isfinite(v).all():
        raise ConfigError("free parameter vector has non-finite entries")
    a2, a3, a4, a5, b3, b4, b5, c4, c5 = v[:9]
    a1 = 1.0 - (a2 + a3 + a4 + a5) - (c4 + c5)
    if mode == MODE_KAPPA:
        k1, k3, k5 = v[9:]
        q = (1.0 - (k1 + k3 + k5), k1, k3, k5)
    else:
        q = (v[9],)
    polys = PolynomialSpec((a1, a2, a3, a4, a5), (b3, b4, b5), (c4, c5), q, mode)
    return MollifierConfig(
        *THETA_SUPREMA,
        _DEFAULT_R[mode] if R is None else R,
        polys,
        grid or GridSettings(),
        mode,
        strict=strict,
    )


def to_free_params(cfg: MollifierConfig) -> np.ndarray:
    p = cfg.polys
    head = [*p.p1_coeffs[1:], *p.p2_coeffs, *p.p3_coeffs]
    if cfg.mode == MODE_KAPPA:
        return np.array([*head, *p.q_coeffs[1:]])
    return np.array([*head, p.q_coeffs[0]])

"""Identity checks: fixed cases, random sweeps, operator reduction."""

import numpy as np
import pytest

from critprop.mollifier import (
    GridSettings,
    MODE_KAPPA,
    MollifierConfig,
    PolynomialSpec,
    paper_kappa_config,
    paper_kappa_star_config,
)
from critprop.quadrature import GridSpec
from critprop.verify import (
    ShiftVector,
    check_int_identity,
    check_operator_reduction_c31,
    check_partial_fraction,
)

GRID_1D = GridSpec(1, 24)


def test_shift_vector_validation():
    sv = ShiftVector(0.0, -1.26, -1.26)
    assert sv.d == 0.0
    ShiftVector(10.0, -10.0, 3.0, 4.0)  # at the cap is fine
    with pytest.raises(ValueError):
        ShiftVector(11.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        ShiftVector(0.0, 0.0, 0.0, float("nan"))


def test_int_identity_limit_case():
    # s -> 0: both sides equal z_log.
    assert check_int_identity(2.0, 0.0, GRID_1D) < 1e-12


def test_int_identity_unit_case():
    # s = 1, z_log = 1: closed form is 1 - 1/e.
    assert check_int_identity(1.0, 1.0, GRID_1D) < 1e-12


def test_int_identity_random_sweep():
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(100):
        s = rng.uniform(-3.0, 3.0)
        z_log = rng.uniform(0.01, 3.0)
        worst = max(worst, check_int_identity(z_log, s, GRID_1D))
    assert worst < 1e-11


def test_int_identity_residual_falls_with_nodes():
    # Few nodes genuinely under-resolve a steep exponential; adding nodes
    # must push the residual down to roundoff.
    coarse = check_int_identity(3.0, -3.0, GridSpec(1, 3))
    fine = check_int_identity(3.0, -3.0, GridSpec(1, 24))
    assert fine < coarse / 100
    assert fine < 1e-11


def test_int_identity_rejects_multidim_grid():
    with pytest.raises(ValueError):
        check_int_identity(1.0, 1.0, GridSpec(2, 8))


def test_partial_fraction_fixed_cases():
    assert check_partial_fraction(1.0, 2.0, 3.0) < 1e-14
    assert check_partial_fraction(0.1, -0.2, 0.5) < 1e-13


def test_partial_fraction_random_sweep():
    rng = np.random.default_rng(42)
    worst = 0.0
    count = 0
    while count < 100:
        a, b, c = rng.uniform(-5.0, 5.0, size=3)
        if min(abs(a + c), abs(b + c), abs(b - a)) < 0.3:
            continue
        worst = max(worst, check_partial_fraction(a, b, c))
        count += 1
    assert worst < 1e-12


def test_partial_fraction_rejects_near_singular():
    with pytest.raises(ValueError):
        check_partial_fraction(1.0, 1.0 + 1e-9, 2.0)  # b - a collapses
    with pytest.raises(ValueError):
        check_partial_fraction(1.0, 2.0, -1.0)  # a + c collapses


def _constant_q_config(R: float) -> MollifierConfig:
    # P1(x) = x with a nonzero P3 summing to zero at 1, Q identically one.
    polys = PolynomialSpec(
        (1.0, 0.0, 0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0),
        (1.0, -1.0),
        (1.0, 0.0, 0.0, 0.0),
        MODE_KAPPA,
    )
    grid = GridSettings(nodes_low_dim=16, nodes_high_dim=10)
    return MollifierConfig(4 / 7, 0.5, 0.25, R, polys, grid, strict=False)


def test_operator_reduction_trivial_q():
    # Q == 1 collapses the operator to evaluation at the base point; the
    # two routes must then agree to roundoff.
    assert check_operator_reduction_c31(_constant_q_config(1.26)) < 1e-8


def test_operator_reduction_trivial_q_zero_rate():
    # With R = 0 on top of Q == 1 both routes reduce to the shift-free
    # integral.
    assert check_operator_reduction_c31(_constant_q_config(0.0)) < 1e-10


def test_operator_reduction_reference_kappa():
    grid = GridSettings(nodes_low_dim=16, nodes_high_dim=10)
    assert check_operator_reduction_c31(paper_kappa_config(grid)) < 1e-6


def test_operator_reduction_reference_kappa_star():
    grid = GridSettings(nodes_low_dim=16, nodes_high_dim=10)
    assert check_operator_reduction_c31(paper_kappa_star_config(grid)) < 1e-6


def test_operator_reduction_stable_under_refinement():
    # Transcription errors would persist across grids; quadrature noise
    # would not.  Both residuals sit at roundoff, so allow an absolute
    # floor when comparing.
    coarse = check_operator_reduction_c31(
        paper_kappa_star_config(GridSettings(nodes_low_dim=10, nodes_high_dim=8))
    )
    fine = check_operator_reduction_c31(
        paper_kappa_star_config(GridSettings(nodes_low_dim=20, nodes_high_dim=8))
    )
    assert fine < 2.0 * coarse + 1e-10
    assert max(fine, coarse) < 1e-6


def test_operator_reduction_order_cap():
    with pytest.raises(ValueError):
        check_operator_reduction_c31(paper_kappa_config(), derivative_order_cap=3)

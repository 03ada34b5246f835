"""Mollifier data: constraints, reference configs, free-parameter round trips."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import polynomial as P

from critprop import jet as J
from critprop.mollifier import (
    ConfigError,
    GridSettings,
    MODE_KAPPA,
    MODE_KAPPA_STAR,
    MollifierConfig,
    PolynomialSpec,
    THETA_SUPREMA,
    free_param_count,
    from_free_params,
    paper_kappa_config,
    paper_kappa_star_config,
    to_free_params,
)


def test_kappa_reference_constraints():
    cfg = paper_kappa_config()
    assert cfg.R == 1.26
    assert (cfg.theta1, cfg.theta2, cfg.theta3) == THETA_SUPREMA
    assert cfg.polys.q_at_0 == pytest.approx(1.0, abs=1e-14)
    assert cfg.polys.p1_at_1 + cfg.polys.p3_at_1 == pytest.approx(1.0, abs=1e-14)
    assert cfg.polys.p1_at_1 == pytest.approx(0.99858, abs=1e-12)
    assert cfg.polys.p3_at_1 == pytest.approx(0.00142, abs=1e-12)


def test_kappa_star_reference_constraints():
    cfg = paper_kappa_star_config()
    assert cfg.R == 1.12
    assert cfg.mode == MODE_KAPPA_STAR
    assert cfg.polys.q_degree == 1
    np.testing.assert_allclose(cfg.polys.q_monomial, [1.0, -1.03232])
    assert cfg.polys.p3_coeffs == (0.00094, -0.00031)


def test_q_basis_conversion_matches_direct_expansion():
    cfg = paper_kappa_config()
    k0, k1, k3, k5 = cfg.polys.q_coeffs
    xs = np.linspace(0.0, 1.0, 13)
    direct = k0 + k1 * (1 - 2 * xs) + k3 * (1 - 2 * xs) ** 3 + k5 * (1 - 2 * xs) ** 5
    np.testing.assert_allclose(P.polyval(xs, cfg.polys.q_monomial), direct, atol=1e-14)


def test_q_at_zero_through_jet_composition():
    cfg = paper_kappa_config()
    sh = J.JetShape((1,))
    out = J.compose_poly(cfg.polys.q_monomial, J.constant(sh, 0.0))
    assert J.extract(out, (0,)) == pytest.approx(1.0, abs=1e-14)


def test_p2_second_derivative_is_symbolic():
    cfg = paper_kappa_config()
    b3, b4, b5 = cfg.polys.p2_coeffs
    np.testing.assert_allclose(cfg.polys.p2_second, [0.0, 6 * b3, 12 * b4, 20 * b5])


def test_constraint_violations_rejected():
    good = paper_kappa_config().polys
    with pytest.raises(ConfigError):
        PolynomialSpec((1.0, 0, 0, 0, 0), good.p2_coeffs, (0.5, 0.0), good.q_coeffs, MODE_KAPPA)
    with pytest.raises(ConfigError):
        PolynomialSpec(good.p1_coeffs, good.p2_coeffs, good.p3_coeffs, (0.3, 0.3, 0.3, 0.3), MODE_KAPPA)
    with pytest.raises(ConfigError):
        PolynomialSpec(good.p1_coeffs, (0.1,), good.p3_coeffs, good.q_coeffs, MODE_KAPPA)
    with pytest.raises(ConfigError):
        PolynomialSpec(good.p1_coeffs, good.p2_coeffs, good.p3_coeffs, good.q_coeffs, "other")


def test_theta_and_r_guards():
    polys = paper_kappa_config().polys
    with pytest.raises(ConfigError):
        MollifierConfig(0.25, 0.5, 0.125, 1.26, polys)  # theta order violated
    with pytest.raises(ConfigError):
        MollifierConfig(0.6, 0.5, 0.25, 1.26, polys)  # above the 4/7 cap
    with pytest.raises(ConfigError):
        MollifierConfig(*THETA_SUPREMA, 3.0, polys)  # strict R window
    with pytest.raises(ConfigError):
        MollifierConfig(*THETA_SUPREMA, -1.0, polys, strict=False)  # R >= 0 always
    # the degenerate-study escape hatch (R = 0 included: terms are defined there,
    # only the bound assembly needs R > 0 and guards that itself)
    cfg = MollifierConfig(*THETA_SUPREMA, 1e-9, polys, strict=False)
    assert cfg.R == 1e-9
    assert MollifierConfig(*THETA_SUPREMA, 0.0, polys, strict=False).R == 0.0


def test_mode_mismatch_rejected():
    polys = paper_kappa_config().polys
    with pytest.raises(ConfigError):
        MollifierConfig(*THETA_SUPREMA, 1.26, polys, mode=MODE_KAPPA_STAR)


def test_round_trip_on_reference_configs():
    for cfg in (paper_kappa_config(), paper_kappa_star_config()):
        v = to_free_params(cfg)
        assert v.size == free_param_count(cfg.mode)
        back = from_free_params(v, cfg.mode, R=cfg.R)
        np.testing.assert_allclose(
            back.polys.p1_monomial, cfg.polys.p1_monomial, rtol=0, atol=1e-14
        )
        np.testing.assert_allclose(
            back.polys.q_monomial, cfg.polys.q_monomial, rtol=0, atol=1e-14
        )
        assert back.polys.p2_coeffs == cfg.polys.p2_coeffs
        assert back.polys.p3_coeffs == cfg.polys.p3_coeffs


def test_free_params_eliminate_a1_consistently():
    # The published sets satisfy the normalization exactly, so reconstructing
    # a1 from the other coefficients must reproduce the printed value.
    cfg = paper_kappa_config()
    back = from_free_params(to_free_params(cfg), MODE_KAPPA)
    assert back.polys.p1_coeffs[0] == pytest.approx(0.83651, abs=1e-14)


def test_zero_vector_gives_plain_one_piece_setup():
    for mode in (MODE_KAPPA, MODE_KAPPA_STAR):
        cfg = from_free_params(np.zeros(free_param_count(mode)), mode)
        np.testing.assert_allclose(cfg.polys.p1_monomial, [0, 1, 0, 0, 0, 0])
        assert cfg.polys.p2_coeffs == (0.0, 0.0, 0.0)
        assert cfg.polys.p3_coeffs == (0.0, 0.0)
        np.testing.assert_allclose(cfg.polys.q_monomial[0], 1.0)
        assert np.abs(cfg.polys.q_monomial[1:]).max() == 0.0


@given(
    v=st.lists(st.floats(-2, 2), min_size=12, max_size=12),
    mode=st.sampled_from([MODE_KAPPA, MODE_KAPPA_STAR]),
)
@settings(max_examples=250)
def test_random_free_vectors_always_satisfy_constraints(v, mode):
    vec = np.asarray(v[: free_param_count(mode)])
    cfg = from_free_params(vec, mode)
    assert abs(cfg.polys.p1_at_1 + cfg.polys.p3_at_1 - 1.0) < 1e-12
    assert abs(cfg.polys.q_at_0 - 1.0) < 1e-12
    round_trip = to_free_params(cfg)
    np.testing.assert_allclose(round_trip, vec, rtol=0, atol=1e-12)


def test_polynomial_values_match_exact_rational_arithmetic():
    from fractions import Fraction

    cfg = paper_kappa_config()
    coeffs = [Fraction(0)] + [Fraction(str(c)) for c in ("0.83651", "0.09758", "-0.29393", "0.73372", "-0.3753")]
    for x in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
        exact = sum(c * x ** k for k, c in enumerate(coeffs))
        got = P.polyval(float(x), cfg.polys.p1_monomial)
        assert got == pytest.approx(float(exact), abs=1e-14)


def test_grid_settings_lookup():
    g = GridSettings(nodes_low_dim=20, nodes_high_dim=12, per_term={"c3": 10})
    assert g.nodes_for("c1", 2) == 20
    assert g.nodes_for("c23", 5) == 12
    assert g.nodes_for("c3", 5) == 10
    assert g.rescaled(2.0).nodes_for("c3", 5) == 20
    assert g.rescaled(0.5).nodes_for("c1", 2) == 10

"""Aggregate bound assembly."""

import math

import pytest

from critprop.kappa import BoundReport, InvalidAggregateError, bound_from_terms, evaluate_bound
from critprop.mollifier import GridSettings, MODE_KAPPA, MODE_KAPPA_STAR, paper_kappa_config
from critprop.terms import TermBreakdown, TermValue


def _breakdown(c1, c2=0.0, c3=0.0, c12=0.0, c23=0.0, c31=0.0):
    tv = lambda v: TermValue(v, None, 0)
    return TermBreakdown(tv(c1), tv(c2), tv(c3), tv(c12), tv(c23), tv(c31))


def test_unit_aggregate_gives_unit_bound():
    rep = bound_from_terms(_breakdown(1.0), 2.0, MODE_KAPPA)
    assert rep.bound == 1.0
    assert rep.c_total == 1.0


def test_bound_formula():
    rep = bound_from_terms(_breakdown(2.0, c12=0.05), 1.26, MODE_KAPPA)
    assert rep.bound == pytest.approx(1.0 - math.log(2.1) / 1.26, rel=1e-15)


def test_bound_decreases_with_aggregate():
    bounds = [
        bound_from_terms(_breakdown(c), 1.26, MODE_KAPPA).bound for c in (1.5, 2.0, 2.5, 3.0)
    ]
    assert bounds == sorted(bounds, reverse=True)


def test_nonpositive_aggregate_rejected():
    with pytest.raises(InvalidAggregateError):
        bound_from_terms(_breakdown(0.0), 1.26, MODE_KAPPA)
    with pytest.raises(InvalidAggregateError):
        bound_from_terms(_breakdown(1.0, c12=-0.6), 1.26, MODE_KAPPA)


def test_bad_rate_and_mode_rejected():
    with pytest.raises(ValueError):
        bound_from_terms(_breakdown(2.0), 0.0, MODE_KAPPA)
    with pytest.raises(ValueError):
        bound_from_terms(_breakdown(2.0), 1.26, "simple")


def test_report_carries_breakdown_and_delta():
    tb = TermBreakdown(
        TermValue(2.0, 1e-12, 100),
        TermValue(0.1, 3e-11, 100),
        TermValue(0.0, None, 100),
        TermValue(0.0, 2e-13, 100),
        TermValue(0.0, None, 100),
        TermValue(0.0, 1e-14, 100),
    )
    rep = bound_from_terms(tb, 1.0, MODE_KAPPA_STAR)
    assert rep.breakdown is tb
    assert rep.max_refinement_delta == 3e-11
    assert rep.mode == MODE_KAPPA_STAR


def test_evaluate_bound_reference_smoke():
    grid = GridSettings(nodes_low_dim=12, nodes_high_dim=8)
    rep = evaluate_bound(paper_kappa_config(grid), refine=False)
    assert isinstance(rep, BoundReport)
    assert rep.bound == pytest.approx(0.410918, abs=5e-4)
    assert rep.R == 1.26

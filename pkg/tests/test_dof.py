import math

import pytest
from hypothesis import given, strategies as st

from misodof.dof import baseline_dof, fit_all, fit_dof, theoretical_dof
from misodof.errors import DomainError, EstimationError
from misodof.sweep import RateSample

GRID = [30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0]


def test_theory_examples():
    assert theoretical_dof(0) == 2 / 3
    assert theoretical_dof(1) == 1 and theoretical_dof(2) == 1
    assert theoretical_dof(0.5) == 0.75
    assert theoretical_dof(0.25) == pytest.approx(0.7)
    with pytest.raises(DomainError):
        theoretical_dof(-0.01)


def test_baseline_examples():
    assert baseline_dof(0) == 2 / 3
    assert baseline_dof(0.9) == 0.9
    assert baseline_dof(0.5) == 2 / 3 < theoretical_dof(0.5)
    assert baseline_dof(3) == 1


@given(st.floats(0, 10), st.floats(0, 10))
def test_theory_monotone(a, b):
    lo, hi = sorted((a, b))
    assert theoretical_dof(lo) <= theoretical_dof(hi)


@given(st.floats(0, 10))
def test_dominance(a):
    assert theoretical_dof(a) >= baseline_dof(a)
    if 1e-9 < a < 1 - 1e-9:  # the gap is below double resolution nearer the ends
        assert theoretical_dof(a) > baseline_dof(a)


def test_continuity_at_one():
    assert theoretical_dof(1 - 1e-12) == pytest.approx(1, abs=1e-9)
    assert theoretical_dof(1 + 1e-12) == 1


def _x(db):
    return db / (10 * math.log10(2))


def test_fit_linear_exact():
    est = fit_dof([(d, 0.75 * _x(d) + 3) for d in GRID], scheme="hybrid")
    assert est.slope == pytest.approx(0.75, abs=1e-12) and est.stderr < 1e-12
    assert (est.p_db_min, est.p_db_max, est.n_points) == (30, 60, 7)


def test_fit_constant():
    assert fit_dof([(d, 2.5) for d in GRID]).slope == 0


def test_fit_stderr(rng):
    pts = [(d, 0.5 * _x(d) + rng.normal(0, 0.1)) for d in GRID]
    est = fit_dof(pts)
    assert 0 < est.stderr < 0.05
    assert est.slope == pytest.approx(0.5, abs=4 * est.stderr)


def test_fit_preconditions():
    with pytest.raises(EstimationError):
        fit_dof([(30, 1), (60, 2)])
    with pytest.raises(EstimationError):
        fit_dof([(30, 1), (40, 2), (45, 3)])


def test_fit_all_groups():
    samples = [RateSample(a, d, s, 100, r * _x(d), r * _x(d))
               for a, r in ((0.0, 0.5), (0.5, 0.25)) for d in GRID for s in ("zf", "mat")]
    est = {(e.alpha, e.scheme): e.slope for e in fit_all(samples)}
    assert est[(0.0, "mat")] == pytest.approx(0.5) and est[(0.5, "zf")] == pytest.approx(0.25)

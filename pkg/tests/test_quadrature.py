import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rmspace.quadrature import (
    DiscGrid,
    GridError,
    build_grid,
    cumulative_integral,
    gauss_legendre,
    graded_rule,
    radial_lp,
    refine_and_estimate,
    tail_rule,
    truncation_note,
)


@pytest.mark.parametrize("bad", [(100, 16, 8), (4, 16, 8), (256, 0, 8), (256, 51, 8), (256, 16, 1)])
def test_grid_validation(bad):
    with pytest.raises(GridError):
        DiscGrid(*bad)


def test_panels_and_weights():
    g = build_grid(64, 12, 5)
    assert g.r_max == 1 - 2.0**-12
    assert g.radii.size == 12 * 5
    assert np.all(np.diff(g.radii) > 0)
    assert g.radial_weights.sum() == pytest.approx(g.r_max, abs=1e-15)
    assert g.rule.angular_weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert g.refined().describe()["angular_count"] == 128


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 15))
def test_gauss_legendre_exact(k):
    x, w = gauss_legendre(8, 0.25, 0.75)
    assert np.dot(w, x**k) == pytest.approx((0.75 ** (k + 1) - 0.25 ** (k + 1)) / (k + 1), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(-60, 60))
def test_trapezoid_exact_on_trig(k):
    g = build_grid(64, 4, 2)
    w = g.rule.angular_weights
    val = np.dot(w, np.exp(1j * k * g.angles))
    assert abs(val - (1.0 if k % 64 == 0 else 0.0)) < 1e-13


def test_integrals_against_scipy():
    g = build_grid(64, 16, 8)
    for fn in (np.exp, lambda r: 1 / (1 + r), lambda r: -np.log1p(-r)):
        ref, _ = integrate.quad(fn, 0, g.r_max, limit=200)
        assert radial_lp(fn(g.radii), 1, g) == pytest.approx(ref, rel=1e-10)


def test_closing_panel_recovers_log():
    plain = build_grid(64, 16, 8)
    closed = build_grid(64, 16, 8, closing=True)
    f = lambda r: -np.log1p(-r)
    assert abs(radial_lp(f(plain.radii), 1, plain) - 1) > 1e-4
    assert abs(np.dot(closed.rule.radial_weights, f(closed.rule.radii)) - 1) < 1e-8
    assert np.all(closed.rule.radii < 1)


def test_cumulative_integral():
    g = build_grid(64, 10, 8)
    r = g.radii
    assert np.allclose(cumulative_integral(np.cos(r), g), np.sin(r), atol=1e-13)


def test_tail_rule():
    g = build_grid(64, 16, 8)
    for rho in (0.0, 0.3, 0.8, 0.99):
        r, w = tail_rule(g, rho)
        assert np.all(r >= rho)
        assert np.dot(w, r**3) == pytest.approx((g.r_max**4 - rho**4) / 4, rel=1e-12)


def test_graded_rule_integrates_peak():
    r, w, t, wt = (lambda rule: (rule.radii, rule.radial_weights, rule.angles, rule.angular_weights))(
        graded_rule(20, 10, 1e-3)
    )
    assert wt.sum() == pytest.approx(1.0, abs=1e-13)
    # 1/(2 pi) int dt / (eps^2 + t^2) over the circle, eps = 1e-3
    eps = 1e-3
    ref = (2 / (2 * math.pi * eps)) * math.atan(math.pi / eps)
    assert np.dot(wt, 1 / (eps**2 + t**2)) == pytest.approx(ref, rel=1e-9)


def test_refine_and_estimate():
    rep = refine_and_estimate(lambda g: float(radial_lp(g.radii, 1, g)), build_grid(64, 8, 4))
    assert rep.value == pytest.approx((1 - 2.0**-10) ** 2 / 2, rel=1e-14)
    assert rep.error_estimate == pytest.approx(abs(rep.value - rep.coarse_value))
    assert "2^-8" in truncation_note(build_grid(64, 8, 4)) or "r_max" in truncation_note(build_grid(64, 8, 4))

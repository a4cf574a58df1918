import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmspace.corpus import random_polynomials
from rmspace.norms import (
    PQPair,
    Quantity,
    boundary_decay_profile,
    conjugate,
    delta_norm_lower,
    delta_prime_norm_lower,
    kernel_family,
    loglog_slope,
    parse_exponent,
    rho_many,
    rho_pq,
    rho_value,
    tail_profile,
)
from rmspace.quadrature import build_grid
from rmspace.series import LogKernel, Polynomial, evaluate, rotated, scaled

CLOSED = build_grid(64, 16, 8, closing=True)
PAIRS = [PQPair(p, q) for p in (1, 2, 3, math.inf) for q in (1, 2, math.inf)]


def test_exponents():
    assert parse_exponent("inf") == math.inf
    assert parse_exponent(" 2.5 ") == 2.5
    with pytest.raises(ValueError):
        parse_exponent(0.5)
    assert conjugate(1) == math.inf and conjugate(math.inf) == 1 and conjugate(3) == 1.5
    assert PQPair("inf", 2).label() == "(inf,2)"
    assert PQPair(4, 4).p_conj == pytest.approx(4 / 3)


@pytest.mark.parametrize("n", [0, 1, 3, 10])
@pytest.mark.parametrize("pq", PAIRS, ids=lambda pq: pq.label())
def test_monomials(n, pq):
    # |z^n| is radial, so rho = (int_0^1 r^{np} dr)^{1/p}
    expect = 1.0 if math.isinf(pq.p) else (n * pq.p + 1) ** (-1 / pq.p)
    got = rho_value(Polynomial((0,) * n + (1,)), pq, CLOSED)
    if math.isinf(pq.p):
        assert got == pytest.approx(CLOSED.r_max**n, rel=1e-14)
    else:
        assert got == pytest.approx(expect, rel=1e-12)


def test_parseval_22():
    # rho_{2,2}(f)^2 = sum |a_n|^2 / (2n+1)
    for f in random_polynomials(10, seed=7):
        a = np.abs(np.asarray(f.coeffs)) ** 2
        expect = math.sqrt(np.sum(a / (2 * np.arange(a.size) + 1)))
        assert rho_value(f, PQPair(2, 2), CLOSED) == pytest.approx(expect, rel=1e-12)


def test_report_fields(grid):
    rep = rho_pq(Polynomial((0, 1)), PQPair(2, 2), grid)
    assert rep.error_estimate >= 0
    assert rep.value == pytest.approx(3**-0.5, abs=1e-4)
    d = rep.to_dict()
    assert {"value", "error_estimate", "grid", "truncation_note"} <= set(d)


def test_rho_many_matches_single(small_grid):
    f = random_polynomials(1, seed=3)[0]
    absf = lambda r, t: np.abs(__import__("rmspace.series", fromlist=["evaluate_polar"]).evaluate_polar(f, r, t))
    many = rho_many(absf, PAIRS, small_grid)
    for pq, v in zip(PAIRS, many):
        assert v == pytest.approx(rho_value(f, pq, small_grid), rel=1e-13)


cplx = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
poly = st.lists(cplx, min_size=1, max_size=6).map(lambda c: Polynomial(tuple(c)))
pair = st.sampled_from(PAIRS)


@settings(max_examples=25, deadline=None)
@given(poly, cplx, pair)
def test_homogeneity(f, c, pq):
    g = build_grid(32, 8, 4)
    assert rho_value(scaled(f, c), pq, g) == pytest.approx(abs(c) * rho_value(f, pq, g), rel=1e-10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(poly, poly, pair)
def test_triangle(f, h, pq):
    g = build_grid(32, 8, 4)
    n = max(len(f.coeffs), len(h.coeffs))
    pad = lambda c: np.pad(np.asarray(c), (0, n - len(c)))
    s = Polynomial(tuple(pad(f.coeffs) + pad(h.coeffs)))
    assert rho_value(s, pq, g) <= rho_value(f, pq, g) + rho_value(h, pq, g) + 1e-12


@settings(max_examples=20, deadline=None)
@given(poly, pair)
def test_rotation_invariance(f, pq):
    # rotation by a grid angle permutes the trapezoid nodes
    g = build_grid(32, 8, 4)
    alpha = 2 * math.pi * 5 / 32
    assert rho_value(rotated(f, alpha), pq, g) == pytest.approx(rho_value(f, pq, g), rel=1e-10, abs=1e-13)


@settings(max_examples=20, deadline=None)
@given(poly)
def test_monotone_in_exponents_and_depth(f):
    g = build_grid(32, 8, 4)
    vals = [rho_value(f, PQPair(p, q), g) for p in (1, 2, 4) for q in (1, 2, 4)]
    grid3 = np.array(vals).reshape(3, 3)
    assert np.all(np.diff(grid3, axis=0) >= -1e-12)
    assert np.all(np.diff(grid3, axis=1) >= -1e-12)
    shallow = rho_value(f, PQPair(2, 2), build_grid(32, 4, 4))
    assert shallow <= rho_value(f, PQPair(2, 2), g) + 1e-12


def test_profiles_and_csv(small_grid, tmp_path):
    f = LogKernel(1)
    tp = tail_profile(f, 2, small_grid)
    assert tp.quantity is Quantity.TAIL_NORM
    assert np.all(np.diff(tp.values) <= 1e-15)
    bp = boundary_decay_profile(Polynomial((0, 1)), 1, small_grid, [0.5, 0.75])
    assert np.allclose(bp.values, [0.25, 0.1875])
    text = bp.to_csv(tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text() == text
    assert text.splitlines()[0] == "rho,value,quantity"
    assert text.splitlines()[1].endswith("BoundaryDecay")
    with pytest.raises(ValueError):
        tail_profile(f, math.inf, small_grid)


def test_kernel_family():
    z = 0.6 + 0.2j
    k = kernel_family(z, 2)
    w = -0.3 + 0.1j
    assert evaluate(k, w) == pytest.approx((1 - z.conjugate() * w) ** -2, rel=1e-14)
    assert evaluate(kernel_family(0, 3), w) == 1


def test_point_evaluation_against_exact_22():
    # exact norm of f -> f(z) on RM(2,2) is sqrt((1+r^2)) / (1-r^2)
    g = build_grid(256, 16, 8, closing=True)
    for r in (0.0, 0.5, 0.8):
        exact = math.sqrt(1 + r * r) / (1 - r * r)
        low = delta_norm_lower(PQPair(2, 2), r, grid=g)
        assert low <= exact * (1 + 1e-10)
        assert low >= 0.9 * exact
        n = np.arange(1, 4000)
        exact_d = math.sqrt(np.sum(n**2 * (2 * n + 1) * r ** (2 * n - 2)))
        low_d = delta_prime_norm_lower(PQPair(2, 2), r, grid=g)
        assert low_d <= exact_d * (1 + 1e-10)
        assert low_d >= 0.8 * exact_d


def test_point_outside_grid_rejected(small_grid):
    with pytest.raises(ValueError):
        delta_norm_lower(PQPair(2, 2), 0.9999, grid=small_grid)


def test_loglog_slope():
    x = np.array([1, 2, 4, 8.0])
    assert loglog_slope(x, 3 * x**1.5) == pytest.approx(1.5)

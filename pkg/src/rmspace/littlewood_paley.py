"""Littlewood-Paley type inequalities with constant p, their tail versions,
the Hardy averaging operator on [0, 1), and converse-ratio experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .norms import PQPair, parse_exponent, rho_many, rho_pq, rho_pq_field
from .quadrature import DiscGrid, cumulative_integral, radial_lp, tail_rule
from .series import FunctionSpec, derivative, evaluate, evaluate_polar

__all__ = [
    "LPReport",
    "CoverageError",
    "hardy_R",
    "lp_check_1d",
    "lp_check",
    "lp_check_many",
    "lp_tail_check",
    "converse_covered",
    "converse_ratio",
    "derivative_field",
]

DEFAULT_TOLERANCE = 1e-6


class CoverageError(ValueError):
    """The (p, q) pair lies outside the cases where the converse is known."""


@dataclass(frozen=True)
class LPReport:
    lhs: float
    rhs: float
    constant_used: float
    slack: float
    holds: bool
    tolerance: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant_used": self.constant_used,
            "slack": self.slack,
            "holds": self.holds,
            "tolerance": self.tolerance,
        }
        out.update(self.extra)
        return out


def _report(lhs: float, rhs: float, p: float, tol: float, **extra) -> LPReport:
    return LPReport(lhs, rhs, p, rhs - lhs, bool(lhs <= rhs + tol), tol, dict(extra))


def _samples(g, radii: np.ndarray) -> np.ndarray:
    return np.asarray(g(radii) if callable(g) else g, dtype=float)


def hardy_R(gv, p: float, grid: DiscGrid) -> dict:
    """Norms of ``g`` and ``Rg(x) = int_0^x g(t)/(1-t) dt`` on ``[0, r_max]``.

    ``gv`` is either a callable of ``r`` or samples at ``grid.radii``.
    """
    p = parse_exponent(p)
    if math.isinf(p):
        raise ValueError("the averaging operator is checked for finite p only")
    r = grid.radii
    g = _samples(gv, r)
    Rg = cumulative_integral(g / (1 - r), grid)
    norm_in = float(radial_lp(np.abs(g), p, grid))
    norm_out = float(radial_lp(np.abs(Rg), p, grid))
    ratio = norm_out / norm_in if norm_in > 0 else 0.0
    return {"norm_in": norm_in, "norm_out": norm_out, "ratio": ratio, "bound": p}


RealPair = tuple  # (f, f') as callables of r on [0, 1)


def _ray(f: Union[FunctionSpec, RealPair], angle: float):
    if isinstance(f, tuple):
        fn, dfn = f
        return (lambda r: np.abs(fn(r))), (lambda r: np.abs(dfn(r))), abs(fn(np.zeros(1))[0])
    u = complex(math.cos(angle), math.sin(angle))
    df = derivative(f)
    return (
        lambda r: np.abs(evaluate_polar(f, r, [angle])[:, 0]),
        lambda r: np.abs(evaluate_polar(df, r, [angle])[:, 0]),
        abs(evaluate(f, 0.0 * u)),
    )


def lp_check_1d(f, p: float, grid: DiscGrid, angle: float = 0.0, tolerance: float = DEFAULT_TOLERANCE) -> LPReport:
    """``||f||_p <= p ||f'(x)(1-x)||_p + |f(0)|`` on one ray.

    ``f`` is a function spec (restricted to the ray at ``angle``) or a pair of
    callables ``(f, f')`` on ``[0, 1)``.
    """
    p = parse_exponent(p)
    if math.isinf(p):
        raise ValueError("the inequality is stated for finite p")
    rule = grid.rule
    fa, dfa, f0 = _ray(f, angle)
    r, w = rule.radii, rule.radial_weights
    lhs = float(np.sum(w * fa(r) ** p) ** (1 / p))
    weighted = float(np.sum(w * (dfa(r) * (1 - r)) ** p) ** (1 / p))
    return _report(lhs, p * weighted + f0, p, tolerance, derivative_term=weighted, f0=f0)


def derivative_field(f: FunctionSpec):
    """The nonnegative field ``|f'(z)| (1 - |z|)``."""
    df = derivative(f)
    return lambda r, t: np.abs(evaluate_polar(df, r, t)) * (1 - np.asarray(r))[:, None]


def _require_finite_p(pq: PQPair):
    if math.isinf(pq.p):
        raise ValueError("p = inf is rejected: the inequality fails for p = inf")


def lp_check(f: FunctionSpec, pq: PQPair, grid: DiscGrid, tolerance: float = DEFAULT_TOLERANCE) -> LPReport:
    """``rho(f) <= p rho(f'(z)(1-|z|)) + |f(0)|`` with two-grid error allowance."""
    _require_finite_p(pq)
    left = rho_pq(f, pq, grid)
    right = rho_pq_field(derivative_field(f), pq, grid)
    f0 = abs(evaluate(f, 0.0))
    allowance = tolerance + 10 * (left.error_estimate + pq.p * right.error_estimate)
    return _report(
        left.value,
        pq.p * right.value + f0,
        pq.p,
        allowance,
        lhs_error=left.error_estimate,
        rhs_error=pq.p * right.error_estimate,
        pq=pq.label(),
    )


def lp_check_many(f: FunctionSpec, pairs: Sequence[PQPair], grid: DiscGrid, tolerance: float = DEFAULT_TOLERANCE) -> list[LPReport]:
    """``lp_check`` for several pairs, sampling each field once per grid."""
    for pq in pairs:
        _require_finite_p(pq)
    absf = lambda r, t: np.abs(evaluate_polar(f, r, t))
    dfield = derivative_field(f)
    fine_grid = grid.refined()
    lc, lf = rho_many(absf, pairs, grid), rho_many(absf, pairs, fine_grid)
    rc, rf = rho_many(dfield, pairs, grid), rho_many(dfield, pairs, fine_grid)
    f0 = abs(evaluate(f, 0.0))
    out = []
    for k, pq in enumerate(pairs):
        le, re_ = abs(lf[k] - lc[k]), abs(rf[k] - rc[k])
        allowance = tolerance + 10 * (le + pq.p * re_)
        out.append(
            _report(lf[k], pq.p * rf[k] + f0, pq.p, allowance, lhs_error=le, rhs_error=pq.p * re_, pq=pq.label())
        )
    return out


def lp_tail_check(
    f: FunctionSpec,
    p: float,
    rho: float,
    grid: DiscGrid,
    theta: float | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> LPReport:
    """Tail inequality on ``[rho, r_max]`` along one ray, or the worst ray when
    ``theta`` is None:

    ``(int |f|^p)^{1/p} <= p (int |f'|^p (1-r)^p)^{1/p} + (1-rho)^{1/p} |f(rho e^{i theta})|``.
    """
    p = parse_exponent(p)
    if math.isinf(p):
        raise ValueError("the tail inequality is stated for finite p")
    angles = grid.angles if theta is None else np.array([float(theta)])
    r, w = tail_rule(grid, rho)
    fv = np.abs(evaluate_polar(f, r, angles))
    dv = np.abs(evaluate_polar(derivative(f), r, angles)) * (1 - r)[:, None]
    start = np.abs(evaluate_polar(f, [rho], angles))[0]
    lhs = (w @ fv**p) ** (1 / p)
    rhs = p * (w @ dv**p) ** (1 / p) + (1 - rho) ** (1 / p) * start
    k = int(np.argmin(rhs - lhs))
    return _report(float(lhs[k]), float(rhs[k]), p, tolerance, theta=float(angles[k]), rho=float(rho))


def converse_covered(pq: PQPair) -> bool:
    p, q = pq.p, pq.q
    if math.isinf(p):
        return True
    if p == 1:
        return not math.isinf(q)
    return 1 < p and 1 < q < math.inf


def converse_ratio(f: FunctionSpec, pq: PQPair, grid: DiscGrid, experimental: bool = False) -> dict:
    """``rho(f'(z)(1-|z|)) / rho(f)``."""
    covered = converse_covered(pq)
    if not covered and not experimental:
        raise CoverageError(f"converse inequality not established for {pq.label()}; pass experimental")
    den = rho_pq(f, pq, grid)
    if den.value == 0:
        raise ValueError("converse ratio undefined for f = 0")
    num = rho_pq_field(derivative_field(f), pq, grid)
    return {
        "ratio": num.value / den.value,
        "numerator": num.value,
        "denominator": den.value,
        "covered": covered,
        "experimental": not covered,
    }

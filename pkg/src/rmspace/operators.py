"""Symbol diagnostics for integration operators: Bloch, little Bloch and
weakly little Bloch classification, plus pointwise symbol estimates.

Limits are never decided.  Membership in B0 and B0w is reported as
YES / NO / UNDECIDED from profiles sampled up to a declared horizon.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .norms import PQPair, Quantity, RadialProfile, default_abscissae, rho_value
from .quadrature import DiscGrid, NormReport
from .series import FunctionSpec, derivative, evaluate, evaluate_polar, tg_apply

__all__ = [
    "Verdict",
    "Thresholds",
    "SymbolDiagnostics",
    "BcdeltaParams",
    "HypothesisError",
    "bloch_seminorm",
    "little_bloch_profile",
    "classify_decay",
    "classify_growth",
    "diagnose_symbol",
    "second_derivative_bound_check",
    "bcdelta_verify",
    "tg_ratio",
]


class Verdict(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    UNDECIDED = "UNDECIDED"


class HypothesisError(ValueError):
    """A hypothesis of a pointwise estimate does not hold for the given data."""


@dataclass(frozen=True)
class Thresholds:
    b0_eps: float = 1e-2
    b0w_eps: float = 1e-2
    measure: float = 0.1
    window: int = 4

    def __post_init__(self):
        if not (self.b0_eps > 0 and self.b0w_eps > 0):
            raise ValueError("thresholds must be positive")
        if not 0 < self.measure < 1:
            raise ValueError("measure threshold must lie in (0, 1)")
        if self.window < 2:
            raise ValueError("decision window needs at least two abscissae")


def _bloch_sup(dg: FunctionSpec, grid: DiscGrid) -> float:
    r = grid.sup_radii
    vals = np.abs(evaluate_polar(dg, r, grid.angles)).max(axis=1)
    return float(np.max((1 - r**2) * vals))


def bloch_seminorm(g: FunctionSpec, grid: DiscGrid) -> NormReport:
    """``max (1 - |z|^2) |g'(z)|`` over the grid nodes; a lower bound for the seminorm."""
    dg = derivative(g)
    coarse = _bloch_sup(dg, grid)
    fine = _bloch_sup(dg, grid.refined())
    return NormReport(
        value=fine,
        error_estimate=abs(fine - coarse),
        grid=grid.describe(),
        truncation_note=f"supremum over |z| <= 1-2^-{grid.shell_depth + 2}; a lower bound",
        coarse_value=coarse,
    )


def little_bloch_profile(g: FunctionSpec, grid: DiscGrid, abscissae=None) -> RadialProfile:
    a = default_abscissae(grid) if abscissae is None else np.asarray(abscissae, float)
    vals = np.abs(evaluate_polar(derivative(g), a, grid.angles)).max(axis=1)
    return RadialProfile(a, (1 - a**2) * vals, Quantity.BLOCH_RADIAL)


def classify_decay(values: Sequence[float], eps: float, window: int = 4) -> Verdict:
    """YES if the tail window is non-increasing and ends below ``eps``;
    NO if it is non-decreasing and ends above ``10*eps``."""
    v = np.asarray(values, dtype=float)[-window:]
    if v.size < 2:
        return Verdict.UNDECIDED
    steps = np.diff(v)
    if v[-1] < eps and np.all(steps <= 0):
        return Verdict.YES
    if v[-1] > 10 * eps and np.all(steps >= 0):
        return Verdict.NO
    return Verdict.UNDECIDED


def classify_growth(values: Sequence[float], window: int = 4) -> Verdict:
    """Boundedness from the profile growth over the tail window.

    YES when the last value is at most 1.5 times the first value in the
    window.  NO when the window is strictly increasing and grows at least 4x.
    """
    v = np.asarray(values, dtype=float)[-window:]
    if v.size < 2 or v[0] <= 0:
        return Verdict.YES if v.size >= 2 and np.all(v == 0) else Verdict.UNDECIDED
    growth = v[-1] / v[0]
    if growth <= 1.5:
        return Verdict.YES
    if growth >= 4 and np.all(np.diff(v) > 0):
        return Verdict.NO
    return Verdict.UNDECIDED


@dataclass(frozen=True, eq=False)
class SymbolDiagnostics:
    bloch_seminorm: NormReport
    bloch_norm: float
    little_bloch_profile: RadialProfile
    directions: np.ndarray
    directional_profiles: np.ndarray  # (len abscissae, len directions)
    in_B: Verdict
    in_B0: Verdict
    in_B0w: Verdict
    horizon: float
    thresholds: Thresholds = field(default_factory=Thresholds)
    direction_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bloch_seminorm": self.bloch_seminorm.to_dict(),
            "bloch_norm": self.bloch_norm,
            "little_bloch_profile": self.little_bloch_profile.to_dict(),
            "classification": {
                "in_B": self.in_B.value,
                "in_B0": self.in_B0.value,
                "in_B0w": self.in_B0w.value,
            },
            "direction_counts": dict(self.direction_counts),
            "horizon": self.horizon,
            "thresholds": {
                "b0_eps": self.thresholds.b0_eps,
                "b0w_eps": self.thresholds.b0w_eps,
                "measure": self.thresholds.measure,
            },
        }


def diagnose_symbol(
    g: FunctionSpec,
    grid: DiscGrid,
    thresholds: Thresholds | None = None,
    directions: Sequence[float] | None = None,
) -> SymbolDiagnostics:
    th = thresholds or Thresholds()
    dirs = grid.angles if directions is None else np.asarray(directions, dtype=float)
    if dirs.size == 0:
        raise ValueError("at least one direction is needed")
    semi = bloch_seminorm(g, grid)
    profile = little_bloch_profile(g, grid)
    a = profile.abscissae
    directional = (1 - a)[:, None] * np.abs(evaluate_polar(derivative(g), a, dirs))

    per_dir = [classify_decay(directional[:, k], th.b0w_eps, th.window) for k in range(dirs.size)]
    n_no = sum(v is Verdict.NO for v in per_dir)
    n_yes = sum(v is Verdict.YES for v in per_dir)
    if n_no / dirs.size > th.measure:
        in_b0w = Verdict.NO
    elif n_yes / dirs.size >= 1 - th.measure:
        in_b0w = Verdict.YES
    else:
        in_b0w = Verdict.UNDECIDED

    return SymbolDiagnostics(
        bloch_seminorm=semi,
        bloch_norm=abs(evaluate(g, 0.0)) + semi.value,
        little_bloch_profile=profile,
        directions=dirs,
        directional_profiles=directional,
        in_B=classify_growth(profile.values, th.window),
        in_B0=classify_decay(profile.values, th.b0_eps, th.window),
        in_B0w=in_b0w,
        horizon=float(a[-1]),
        thresholds=th,
        direction_counts={"total": int(dirs.size), "yes": n_yes, "no": n_no},
    )


def second_derivative_bound_check(g: FunctionSpec, B: float, grid: DiscGrid) -> dict:
    """``max |g''(z)| (1-|z|)^2 / (4B)`` over the grid; holds iff at most 1."""
    r = grid.sup_radii
    dg = derivative(g)
    measured = float(np.max((1 - r) * np.abs(evaluate_polar(dg, r, grid.angles)).max(axis=1)))
    if not B > 0 or B < measured * (1 - 1e-12):
        raise HypothesisError(
            f"B = {B} is below the measured sup (1-|z|)|g'(z)| = {measured}"
        )
    d2 = np.abs(evaluate_polar(derivative(dg), r, grid.angles)).max(axis=1)
    ratio = float(np.max(d2 * (1 - r) ** 2) / (4 * B))
    return {"holds": ratio <= 1 + 1e-9, "max_ratio": ratio, "measured_bloch": measured}


@dataclass(frozen=True)
class BcdeltaParams:
    B: float
    c: float
    eta: float
    a: float
    delta: float | None = None

    def __post_init__(self):
        if not (self.B > 0 and self.c > 0):
            raise ValueError("B and c must be positive")
        if not 0 < self.eta < 0.5:
            raise ValueError("eta must lie in (0, 1/2)")
        if self.delta is None:
            object.__setattr__(self, "delta", self.c / (32 * self.B))
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        if self.delta > self.c / (32 * self.B) * (1 + 1e-12):
            raise ValueError("delta must not exceed c/(32B)")


def bcdelta_verify(g: FunctionSpec, params: BcdeltaParams, resolution: int = 33) -> dict:
    """Check ``|g'| > c/eta`` on the box around ``(1-eta) e^{ia}`` of half-width ``delta*eta``."""
    dg = derivative(g)
    eta, c, a = params.eta, params.c, params.a
    centre = (1 - eta) * complex(math.cos(a), math.sin(a))
    if not abs(evaluate(dg, centre)) * eta > 2 * c:
        raise HypothesisError("hypothesis |g'((1-eta)e^{ia})| eta > 2c fails")
    h = params.delta * eta
    rs = np.linspace(1 - eta - h, 1 - eta + h, resolution)
    ts = np.linspace(a - h, a + h, resolution)
    vals = np.abs(evaluate_polar(dg, rs, ts))
    min_ratio = float(vals.min() * eta / c)
    return {"verified": min_ratio > 1, "min_ratio": min_ratio, "delta": params.delta}


def tg_ratio(f: FunctionSpec, g: FunctionSpec, pq: PQPair, grid: DiscGrid, order: int) -> float:
    """``rho(T_g f) / rho(f)`` with ``T_g f`` truncated to degree ``order``."""
    Tf = tg_apply(f, g, order).to_polynomial()
    return rho_value(Tf, pq, grid) / rho_value(f, pq, grid)

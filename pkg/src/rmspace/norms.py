"""Mixed radial/angular norms rho_{p,q} and boundary diagnostics."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .quadrature import (
    DiscGrid,
    NormReport,
    PolarRule,
    angular_lq,
    radial_lp,
    tail_rule,
    truncation_note,
)
from .series import FunctionSpec, Polynomial, RationalPower, derivative, evaluate, evaluate_polar

__all__ = [
    "ExtExponent",
    "parse_exponent",
    "conjugate",
    "PQPair",
    "Quantity",
    "RadialProfile",
    "rho_field",
    "rho_value",
    "rho_many",
    "rho_pq",
    "rho_pq_field",
    "default_abscissae",
    "tail_profile",
    "boundary_decay_profile",
    "kernel_family",
    "delta_norm_lower",
    "delta_prime_norm_lower",
    "loglog_slope",
    "DEFAULT_POWERS",
]

ExtExponent = float  # a value in [1, inf]; math.inf stands for the sup case

DEFAULT_POWERS = (1.25, 1.5, 2.0, 2.5, 3.0, 4.0)

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def parse_exponent(value) -> float:
    if isinstance(value, str):
        text = value.strip().lower()
        value = math.inf if text in ("inf", "infinity", "oo") else float(text)
    value = float(value)
    if not value >= 1:
        raise ValueError(f"exponent must lie in [1, inf], got {value}")
    return value


def conjugate(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1)


@dataclass(frozen=True)
class PQPair:
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "q", parse_exponent(self.q))

    @property
    def p_conj(self) -> float:
        return conjugate(self.p)

    @property
    def q_conj(self) -> float:
        return conjugate(self.q)

    def label(self) -> str:
        fmt = lambda x: "inf" if math.isinf(x) else f"{x:g}"
        return f"({fmt(self.p)},{fmt(self.q)})"


class Quantity(str, enum.Enum):
    TAIL_NORM = "TailNorm"
    BOUNDARY_DECAY = "BoundaryDecay"
    BLOCH_RADIAL = "BlochRadial"


@dataclass(frozen=True, eq=False)
class RadialProfile:
    abscissae: np.ndarray
    values: np.ndarray
    quantity: Quantity

    def __post_init__(self):
        a = np.asarray(self.abscissae, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.shape != v.shape or a.ndim != 1:
            raise ValueError("abscissae and values must be 1-D of equal length")
        if a.size and (np.any(np.diff(a) <= 0) or a[-1] >= 1 or a[0] < 0):
            raise ValueError("abscissae must be strictly increasing in [0, 1)")
        if np.any(v < 0):
            raise ValueError("profile values must be nonnegative")
        object.__setattr__(self, "abscissae", a)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "quantity", Quantity(self.quantity))

    def rows(self):
        return [(float(r), float(v), self.quantity.value) for r, v in zip(self.abscissae, self.values)]

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rho", "value", "quantity"])
        for r, v, q in self.rows():
            writer.writerow([repr(r), repr(v), q])
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity.value,
            "rho": [float(x) for x in self.abscissae],
            "value": [float(x) for x in self.values],
        }


def _rule(grid) -> PolarRule:
    return grid.rule if isinstance(grid, DiscGrid) else grid


def _combine(radial_samples: np.ndarray, p: float, q: float, rule: PolarRule) -> float:
    per_angle = radial_lp(radial_samples, p, rule, axis=0)
    return float(angular_lq(per_angle, q, rule.angular_weights))


def rho_field(field: Field, pq: PQPair, grid) -> float:
    """rho_{p,q} of a nonnegative field ``field(r, theta) -> (len r, len theta)``."""
    rule = _rule(grid)
    radii = rule.sup_radii if math.isinf(pq.p) else rule.radii
    samples = np.asarray(field(radii, rule.angles), dtype=float)
    return _combine(samples, pq.p, pq.q, rule)


def _abs_field(f: FunctionSpec) -> Field:
    return lambda r, t: np.abs(evaluate_polar(f, r, t))


def rho_value(f: FunctionSpec, pq: PQPair, grid) -> float:
    """rho_{p,q}(f) on a single grid (no refinement)."""
    return rho_field(_abs_field(f), pq, grid)


def rho_many(field: Field, pairs: Sequence[PQPair], grid) -> list[float]:
    """Several (p,q) norms of one field, sampling it at most twice."""
    rule = _rule(grid)
    cache = {}
    out = []
    for pq in pairs:
        key = math.isinf(pq.p)
        if key not in cache:
            radii = rule.sup_radii if key else rule.radii
            cache[key] = np.asarray(field(radii, rule.angles), dtype=float)
        out.append(_combine(cache[key], pq.p, pq.q, rule))
    return out


def rho_pq_field(field: Field, pq: PQPair, grid: DiscGrid) -> NormReport:
    coarse = rho_field(field, pq, grid)
    fine = rho_field(field, pq, grid.refined())
    return NormReport(
        value=fine,
        error_estimate=abs(fine - coarse),
        grid=grid.describe(),
        truncation_note=truncation_note(grid),
        coarse_value=coarse,
    )


def rho_pq(f: FunctionSpec, pq: PQPair, grid: DiscGrid) -> NormReport:
    """rho_{p,q}(f) on ``grid`` and its refinement, with a two-grid error estimate."""
    return rho_pq_field(_abs_field(f), pq, grid)


# -- profiles ------------------------------------------------------------------------


def default_abscissae(grid: DiscGrid) -> np.ndarray:
    j = np.arange(1, max(grid.shell_depth - 1, 1))
    return 1.0 - 2.0**-j


def _check_abscissae(grid: DiscGrid, abscissae) -> np.ndarray:
    a = default_abscissae(grid) if abscissae is None else np.asarray(abscissae, dtype=float)
    if a.size and (a.min() < 0 or a.max() >= grid.r_max):
        raise ValueError("profile abscissae must lie in [0, r_max)")
    return a


def tail_profile(f: FunctionSpec, p: float, grid: DiscGrid, abscissae: Iterable[float] | None = None) -> RadialProfile:
    """``sup_theta (int_rho^{r_max} |f|^p dr)^{1/p}`` at each abscissa."""
    p = parse_exponent(p)
    if math.isinf(p):
        raise ValueError("tail profiles need a finite p")
    a = _check_abscissae(grid, abscissae)
    values = []
    for rho in a:
        radii, weights = tail_rule(grid, float(rho))
        vals = np.abs(evaluate_polar(f, radii, grid.angles)) ** p
        per_angle = (weights @ vals) ** (1.0 / p)
        values.append(float(per_angle.max()))
    return RadialProfile(a, np.array(values), Quantity.TAIL_NORM)


def boundary_decay_profile(f: FunctionSpec, p: float, grid: DiscGrid, abscissae: Iterable[float] | None = None) -> RadialProfile:
    """``sup_theta (1 - rho)^{1/p} |f(rho e^{i theta})|`` at each abscissa."""
    p = parse_exponent(p)
    if math.isinf(p):
        raise ValueError("boundary decay profiles need a finite p")
    a = _check_abscissae(grid, abscissae)
    vals = np.abs(evaluate_polar(f, a, grid.angles)).max(axis=1) if a.size else np.array([])
    return RadialProfile(a, (1 - a) ** (1.0 / p) * vals, Quantity.BOUNDARY_DECAY)


# -- point-evaluation functionals ---------------------------------------------------------


def kernel_family(z: complex, t: float) -> FunctionSpec:
    """``w -> (1 - conj(z) w)**(-t)``; the constant 1 when ``z = 0``."""
    z = complex(z)
    if z == 0:
        return Polynomial((1.0,))
    pole = 1 / z.conjugate()
    return RationalPower(pole, t, pole**t)


def _check_point(z: complex, grid) -> complex:
    z = complex(z)
    if abs(z) > _rule(grid).r_max:
        raise ValueError("|z| must not exceed r_max")
    return z


def delta_norm_lower(pq: PQPair, z: complex, powers: Sequence[float] = DEFAULT_POWERS, grid=None) -> float:
    """Lower bound for the norm of point evaluation at ``z``."""
    z = _check_point(z, grid)
    best = 0.0
    for t in powers:
        if not t > 1:
            raise ValueError("kernel powers must exceed 1")
        f = kernel_family(z, t)
        best = max(best, abs(evaluate(f, z)) / rho_value(f, pq, grid))
    return best


def delta_prime_norm_lower(pq: PQPair, z: complex, powers: Sequence[float] = DEFAULT_POWERS, grid=None) -> float:
    """Lower bound for the norm of derivative evaluation at ``z``."""
    z = _check_point(z, grid)
    best = 0.0
    for t in powers:
        if not t > 1:
            raise ValueError("kernel powers must exceed 1")
        f = kernel_family(z, t)
        num = abs(evaluate(derivative(f), z))
        if num > 0:
            best = max(best, num / rho_value(f, pq, grid))
    if z == 0:
        ident = Polynomial((0.0, 1.0))
        best = max(best, 1.0 / rho_value(ident, pq, grid))
    return best


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])

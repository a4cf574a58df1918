"""Symbolic analytic functions on the unit disc.

A function spec is an immutable tree built from five kinds: polynomials,
sparse (lacunary) power series, log kernels ``-s*log(1 - lam*z)``, rational
power kernels ``s*(w0 - z)**(-t)`` and sums.  Every kind supports closed-form
evaluation, exact symbolic differentiation and Taylor coefficient extraction.

Branch convention for rational powers: ``(w0 - z)**(-t)`` is taken as
``w0**(-t) * (1 - z/w0)**(-t)`` with principal powers.  Because ``|z/w0| < 1``
on the disc, ``1 - z/w0`` stays in the right half-plane and the kernel is
analytic there; for positive real ``w0`` this is the principal branch of
``(w0 - z)**(-t)`` itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "SpecError",
    "Polynomial",
    "Lacunary",
    "LogKernel",
    "RationalPower",
    "Sum",
    "FunctionSpec",
    "CoeffVector",
    "parse_spec",
    "serialize",
    "evaluate",
    "evaluate_polar",
    "derivative",
    "coefficients",
    "tg_apply",
    "scaled",
    "rotated",
]


class SpecError(ValueError):
    """Raised for malformed or out-of-domain function specs."""


def _as_complex_tuple(values) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = _as_complex_tuple(self.coeffs)
        if not coeffs:
            coeffs = (0j,)
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise SpecError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class Lacunary:
    """Sparse series ``sum_k coeffs[k] * z**exponents[k]``.

    ``ratio`` is the optional lacunarity flag: when given it must exceed 1 and
    every consecutive exponent ratio must be at least ``ratio``.
    """

    exponents: tuple[int, ...]
    coeffs: tuple[complex, ...]
    ratio: float | None = None

    def __post_init__(self):
        exps = tuple(int(n) for n in self.exponents)
        coeffs = _as_complex_tuple(self.coeffs)
        if len(exps) != len(coeffs):
            raise SpecError("lacunary series needs one coefficient per exponent")
        if not exps:
            raise SpecError("lacunary series needs at least one term")
        if exps[0] < 1:
            raise SpecError("lacunary exponents must be positive integers")
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise SpecError("lacunary exponents must be strictly increasing")
        if self.ratio is not None:
            ratio = float(self.ratio)
            if not ratio > 1:
                raise SpecError("declared lacunarity ratio must exceed 1")
            worst = min((b / a for a, b in zip(exps, exps[1:])), default=math.inf)
            if worst < ratio:
                raise SpecError(
                    f"lacunarity violated: min exponent ratio {worst:.6g} < declared {ratio:.6g}"
                )
            object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.exponents[-1]


@dataclass(frozen=True)
class LogKernel:
    """``z -> -scale * log(1 - lam*z)`` on the principal branch, ``|lam| <= 1``."""

    lam: complex = 1.0
    scale: complex = 1.0

    def __post_init__(self):
        lam = complex(self.lam)
        if abs(lam) > 1 + 1e-15:
            raise SpecError("log kernel requires |lambda| <= 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "scale", complex(self.scale))


@dataclass(frozen=True)
class RationalPower:
    """``z -> scale * (pole - z)**(-power)`` with ``|pole| >= 1`` and ``power > 0``."""

    pole: complex
    power: float
    scale: complex = 1.0

    def __post_init__(self):
        pole = complex(self.pole)
        power = float(self.power)
        if not abs(pole) >= 1 - 1e-12:
            raise SpecError(f"rational power pole {pole} lies inside the unit disc")
        if not power > 0:
            raise SpecError("rational power exponent must be positive")
        object.__setattr__(self, "pole", pole)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "scale", complex(self.scale))

    @property
    def prefactor(self) -> complex:
        """``scale * pole**(-power)``, the value at the origin."""
        return self.scale * self.pole ** (-self.power)


@dataclass(frozen=True)
class Sum:
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        for part in parts:
            if not isinstance(part, _KINDS):
                raise SpecError(f"sum part {part!r} is not a function spec")
        object.__setattr__(self, "parts", parts)


_KINDS = (Polynomial, Lacunary, LogKernel, RationalPower, Sum)
FunctionSpec = Union[Polynomial, Lacunary, LogKernel, RationalPower, Sum]


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Taylor coefficients ``a_0..a_N`` (index = degree)."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise SpecError("coefficient vector must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise SpecError("coefficient vector must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def to_polynomial(self) -> Polynomial:
        return Polynomial(tuple(self.coeffs))


# -- serialization -----------------------------------------------------------


def _cjson(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def _cparse(value, field: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SpecError(f"field {field!r} must be a [re, im] pair of numbers")
    return complex(value[0], value[1])


def serialize(f: FunctionSpec) -> dict:
    """Return the JSON-ready document describing ``f``."""
    if isinstance(f, Polynomial):
        return {"kind": "polynomial", "coeffs": [_cjson(c) for c in f.coeffs]}
    if isinstance(f, Lacunary):
        doc = {
            "kind": "lacunary",
            "exponents": list(f.exponents),
            "coeffs": [_cjson(c) for c in f.coeffs],
        }
        if f.ratio is not None:
            doc["ratio"] = f.ratio
        return doc
    if isinstance(f, LogKernel):
        doc = {"kind": "log_kernel", "lambda": _cjson(f.lam)}
        if f.scale != 1:
            doc["scale"] = _cjson(f.scale)
        return doc
    if isinstance(f, RationalPower):
        return {
            "kind": "rational_power",
            "pole": _cjson(f.pole),
            "power": f.power,
            "scale": _cjson(f.scale),
        }
    if isinstance(f, Sum):
        return {"kind": "sum", "parts": [serialize(p) for p in f.parts]}
    raise SpecError(f"not a function spec: {f!r}")


def _require(doc: dict, allowed: set[str], required: set[str]) -> None:
    extra = set(doc) - allowed
    if extra:
        raise SpecError(f"unexpected fields for kind {doc.get('kind')!r}: {sorted(extra)}")
    missing = required - set(doc)
    if missing:
        raise SpecError(f"missing fields for kind {doc.get('kind')!r}: {sorted(missing)}")


def parse_spec(document) -> FunctionSpec:
    """Build a spec from a JSON string or an already-decoded mapping."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict) or "kind" not in document:
        raise SpecError("function spec must be an object with a 'kind' field")
    kind = document["kind"]
    if kind == "polynomial":
        _require(document, {"kind", "coeffs"}, {"kind", "coeffs"})
        coeffs = document["coeffs"]
        if not isinstance(coeffs, list):
            raise SpecError("'coeffs' must be a list")
        return Polynomial(tuple(_cparse(c, "coeffs") for c in coeffs))
    if kind == "lacunary":
        _require(document, {"kind", "exponents", "coeffs", "ratio"}, {"kind", "exponents", "coeffs"})
        exps = document["exponents"]
        if not isinstance(exps, list) or not all(
            isinstance(n, int) and not isinstance(n, bool) for n in exps
        ):
            raise SpecError("'exponents' must be a list of integers")
        coeffs = document["coeffs"]
        if not isinstance(coeffs, list):
            raise SpecError("'coeffs' must be a list")
        return Lacunary(
            tuple(exps), tuple(_cparse(c, "coeffs") for c in coeffs), document.get("ratio")
        )
    if kind == "log_kernel":
        _require(document, {"kind", "lambda", "scale"}, {"kind", "lambda"})
        scale = _cparse(document["scale"], "scale") if "scale" in document else 1.0
        return LogKernel(_cparse(document["lambda"], "lambda"), scale)
    if kind == "rational_power":
        _require(document, {"kind", "pole", "power", "scale"}, {"kind", "pole", "power"})
        power = document["power"]
        if not isinstance(power, (int, float)) or isinstance(power, bool):
            raise SpecError("'power' must be a number")
        scale = _cparse(document["scale"], "scale") if "scale" in document else 1.0
        return RationalPower(_cparse(document["pole"], "pole"), power, scale)
    if kind == "sum":
        _require(document, {"kind", "parts"}, {"kind", "parts"})
        if not isinstance(document["parts"], list):
            raise SpecError("'parts' must be a list")
        return Sum(tuple(parse_spec(p) for p in document["parts"]))
    raise SpecError(f"unknown kind {kind!r}")


# -- evaluation ----------------------------------------------------------------


def _eval(f: FunctionSpec, z: np.ndarray) -> np.ndarray:
    if isinstance(f, Polynomial):
        return np.polynomial.polynomial.polyval(z, np.asarray(f.coeffs))
    if isinstance(f, Lacunary):
        out = np.zeros(z.shape, dtype=complex)
        for n, a in zip(f.exponents, f.coeffs):
            out += a * z**n
        return out
    if isinstance(f, LogKernel):
        return -f.scale * np.log(1 - f.lam * z)
    if isinstance(f, RationalPower):
        return f.prefactor * (1 - z / f.pole) ** (-f.power)
    if isinstance(f, Sum):
        out = np.zeros(z.shape, dtype=complex)
        for part in f.parts:
            out += _eval(part, z)
        return out
    raise SpecError(f"not a function spec: {f!r}")


def evaluate(f: FunctionSpec, z):
    """Evaluate ``f`` at a point or array of points of the open unit disc."""
    arr = np.asarray(z, dtype=complex)
    if np.any(np.abs(arr) >= 1):
        raise ValueError("evaluation point outside the open unit disc")
    out = _eval(f, arr)
    return complex(out) if out.ndim == 0 else out


_CHUNK = 1 << 21


def _sparse_polar(exps: np.ndarray, coeffs: np.ndarray, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # sum_k c_k r^n_k e^{i n_k theta} as (len(r) x K) @ (K x len(theta)), chunked on theta
    radial = coeffs[None, :] * r[:, None] ** exps[None, :]
    out = np.empty((r.size, theta.size), dtype=complex)
    step = max(1, _CHUNK // max(1, exps.size))
    for lo in range(0, theta.size, step):
        th = theta[lo : lo + step]
        out[:, lo : lo + step] = radial @ np.exp(1j * np.outer(exps, th))
    return out


def evaluate_polar(f: FunctionSpec, r, theta) -> np.ndarray:
    """Values ``f(r_i e^{i theta_j})`` as a ``(len(r), len(theta))`` array."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(r < 0) or np.any(r >= 1):
        raise ValueError("radii must lie in [0, 1)")
    if isinstance(f, Polynomial):
        return _sparse_polar(
            np.arange(len(f.coeffs), dtype=float), np.asarray(f.coeffs), r, theta
        )
    if isinstance(f, Lacunary):
        return _sparse_polar(
            np.asarray(f.exponents, dtype=float), np.asarray(f.coeffs), r, theta
        )
    if isinstance(f, Sum):
        out = np.zeros((r.size, theta.size), dtype=complex)
        for part in f.parts:
            out += evaluate_polar(part, r, theta)
        return out
    return _eval(f, r[:, None] * np.exp(1j * theta)[None, :])


# -- calculus --------------------------------------------------------------------


def derivative(f: FunctionSpec) -> FunctionSpec:
    """Exact symbolic derivative, closed under the five kinds."""
    if isinstance(f, Polynomial):
        if len(f.coeffs) == 1:
            return Polynomial((0j,))
        return Polynomial(tuple(k * c for k, c in enumerate(f.coeffs) if k > 0))
    if isinstance(f, Lacunary):
        exps = [n - 1 for n in f.exponents]
        coeffs = [n * a for n, a in zip(f.exponents, f.coeffs)]
        if exps[0] == 0:
            head = Polynomial((coeffs[0],))
            if len(exps) == 1:
                return head
            return Sum((head, Lacunary(tuple(exps[1:]), tuple(coeffs[1:]))))
        return Lacunary(tuple(exps), tuple(coeffs))
    if isinstance(f, LogKernel):
        if f.lam == 0:
            return Polynomial((0j,))
        # -s log(1 - lam z)  ->  s lam / (1 - lam z) = s / (1/lam - z)
        return RationalPower(1 / f.lam, 1.0, f.scale)
    if isinstance(f, RationalPower):
        return RationalPower(f.pole, f.power + 1, f.scale * f.power)
    if isinstance(f, Sum):
        return Sum(tuple(derivative(p) for p in f.parts))
    raise SpecError(f"not a function spec: {f!r}")


def _binomial_series(t: float, N: int) -> np.ndarray:
    """Coefficients of ``(1 - x)**(-t)``: ``Gamma(t+k) / (Gamma(t) k!)``."""
    k = np.arange(N + 1)
    if float(t).is_integer():
        ti = int(t)
        return np.array([float(math.comb(ti + kk - 1, kk)) for kk in k])
    lg = np.array([math.lgamma(t + kk) - math.lgamma(kk + 1) for kk in k]) - math.lgamma(t)
    return np.exp(lg)


def coefficients(f: FunctionSpec, N: int) -> CoeffVector:
    """Taylor coefficients ``a_0..a_N`` from closed forms."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    out = np.zeros(N + 1, dtype=complex)
    if isinstance(f, Polynomial):
        c = np.asarray(f.coeffs)[: N + 1]
        out[: c.size] = c
    elif isinstance(f, Lacunary):
        for n, a in zip(f.exponents, f.coeffs):
            if n <= N:
                out[n] = a
    elif isinstance(f, LogKernel):
        k = np.arange(1, N + 1)
        out[1:] = f.scale * f.lam**k / k
    elif isinstance(f, RationalPower):
        # (1 - z/w0)^{-t} = sum binom(t+k-1, k) w0^{-k} z^k
        k = np.arange(N + 1)
        log_w = np.log(f.pole)
        out[:] = f.prefactor * _binomial_series(f.power, N) * np.exp(-k * log_w)
    elif isinstance(f, Sum):
        for part in f.parts:
            out += coefficients(part, N).coeffs
    else:
        raise SpecError(f"not a function spec: {f!r}")
    return CoeffVector(out)


def tg_apply(f: FunctionSpec, g: FunctionSpec, N: int) -> CoeffVector:
    """Coefficients ``d_0..d_N`` of ``T_g f(z) = int_0^z f(w) g'(w) dw``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    a = coefficients(f, N).coeffs
    b = coefficients(derivative(g), N).coeffs
    prod = np.convolve(a, b)[:N]
    d = np.zeros(N + 1, dtype=complex)
    d[1:] = prod / np.arange(1, N + 1)
    return CoeffVector(d)


# -- transformations -------------------------------------------------------------


def scaled(f: FunctionSpec, c: complex) -> FunctionSpec:
    """The spec of ``c * f``."""
    c = complex(c)
    if isinstance(f, Polynomial):
        return Polynomial(tuple(c * a for a in f.coeffs))
    if isinstance(f, Lacunary):
        return Lacunary(f.exponents, tuple(c * a for a in f.coeffs), f.ratio)
    if isinstance(f, LogKernel):
        return LogKernel(f.lam, c * f.scale)
    if isinstance(f, RationalPower):
        return RationalPower(f.pole, f.power, c * f.scale)
    if isinstance(f, Sum):
        return Sum(tuple(scaled(p, c) for p in f.parts))
    raise SpecError(f"not a function spec: {f!r}")


def rotated(f: FunctionSpec, alpha: float) -> FunctionSpec:
    """The spec of ``z -> f(e^{i alpha} z)``."""
    u = complex(math.cos(alpha), math.sin(alpha))
    if isinstance(f, Polynomial):
        return Polynomial(tuple(a * u**k for k, a in enumerate(f.coeffs)))
    if isinstance(f, Lacunary):
        return Lacunary(f.exponents, tuple(a * u**n for n, a in zip(f.exponents, f.coeffs)), f.ratio)
    if isinstance(f, LogKernel):
        return LogKernel(f.lam * u, f.scale)
    if isinstance(f, RationalPower):
        pole = f.pole / u
        # keep scale * pole^{-t} fixed so the kernel is the same analytic branch
        return RationalPower(pole, f.power, f.prefactor * pole**f.power)
    if isinstance(f, Sum):
        return Sum(tuple(rotated(p, alpha) for p in f.parts))
    raise SpecError(f"not a function spec: {f!r}")

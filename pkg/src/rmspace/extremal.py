"""Explicit constructions with checkable constants: lacunary norm
equivalence, the l1-copy integrals, the u_k kernel bound and the c0 kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .norms import PQPair, rho_pq
from .quadrature import DiscGrid, build_grid, gauss_legendre, graded_rule
from .series import Lacunary, LogKernel, Polynomial, RationalPower, tg_apply

__all__ = [
    "lacunary_equiv",
    "L1CopyParams",
    "l1_copy_delta",
    "l1_copy_profile",
    "l1_copy_antiderivative",
    "l1_copy_integral",
    "l1_copy_intervals",
    "tg_profile_series",
    "UkParams",
    "uk_spec",
    "uk_phi",
    "uk_phi_closed_form",
    "claim_check",
    "C0KernelParams",
    "admissible_radii",
    "c0_constants",
    "c0_kernel",
    "c0_modulus",
    "c0_rho",
    "c0_constant_checks",
]


# -- lacunary series ----------------------------------------------------------------


def lacunary_equiv(exponents: Sequence[int], coeffs: Sequence[complex], pq: PQPair, grid: DiscGrid, ratio: float | None = None) -> dict:
    """Quadrature norm against the coefficient model ``(sum |a_k|^p / n_k)^{1/p}``."""
    if math.isinf(pq.p):
        raise ValueError("the coefficient model needs a finite p")
    f = Lacunary(tuple(exponents), tuple(coeffs), ratio)
    if max(f.exponents) > grid.angular_count // 4:
        raise ValueError(
            f"degree {max(f.exponents)} exceeds M/4 = {grid.angular_count // 4}; raise --grid-angles"
        )
    report = rho_pq(f, pq, grid)
    a = np.abs(np.asarray(f.coeffs))
    n = np.asarray(f.exponents, dtype=float)
    model = float(np.sum(a**pq.p / n) ** (1 / pq.p))
    return {
        "numeric": report.value,
        "error_estimate": report.error_estimate,
        "model": model,
        "ratio": report.value / model,
    }


# -- l1 copy ---------------------------------------------------------------------------


@dataclass(frozen=True)
class L1CopyParams:
    beta: int
    n: int

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 2:
            raise ValueError("beta must be an integer >= 2")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def N(self) -> int:
        return int(self.beta) ** int(self.n)

    @property
    def closed_form(self) -> float:
        return self.N / (1 + self.N)


def l1_copy_delta(beta: int) -> float:
    return 2 / 3 * beta / (1 + beta)


_DIRECT_MAX = 1 << 14


def _partial_log(r: np.ndarray, N: int) -> np.ndarray:
    # sum_{k=1}^N r^k / k by Horner
    c = np.zeros(N + 1)
    c[1:] = 1.0 / np.arange(1, N + 1)
    return np.polynomial.polynomial.polyval(r, c)


def _log_tail(N: int, r: np.ndarray) -> np.ndarray:
    """``sum_{j>N} r^j / j`` for large ``N``.

    With ``r = e^{-a}`` the tail is ``int_a^inf e^{-Mx} / (1 - e^{-x}) dx``,
    ``M = N + 1``; expanding ``1/(1-e^{-x}) = 1/x + 1/2 + x/12 - x^3/720``
    gives exponential integrals plus moments, exact to ``O(M^-6)``.
    """
    M = float(N + 1)
    a = -np.log1p(-(1 - r))
    y = M * a
    e = np.exp(-y)
    out = special.exp1(y) + e / (2 * M) + e * (a / M + 1 / M**2) / 12
    out -= e * (a**3 / M + 3 * a**2 / M**2 + 6 * a / M**3 + 6 / M**4) / 720
    return out


def l1_copy_profile(N: int, r) -> np.ndarray:
    """``T_g(N z^N)(r) = N sum_{j>N} r^j / j`` for ``g = -log(1-z)``."""
    r = np.asarray(r, dtype=float)
    if N <= _DIRECT_MAX:
        return N * (-np.log1p(-r) - _partial_log(r, N))
    return N * _log_tail(N, r)


def l1_copy_antiderivative(N: int, r) -> np.ndarray:
    """``int_0^r T_g(N z^N)``; equals ``N/(N+1)`` in the limit ``r -> 1``."""
    r = np.asarray(r, dtype=float)
    return N * r ** (N + 1) / (N + 1) - (1 - r) * l1_copy_profile(N, r)


def l1_copy_integral(params: L1CopyParams, grid: DiscGrid) -> dict:
    """Radial L1 norm along theta = 0 of ``T_g(beta^n z^{beta^n})``, with ``g = -log(1-z)``."""
    rule = grid.rule
    N = params.N
    vals = l1_copy_profile(N, rule.radii)
    quad = float(np.sum(rule.radial_weights * np.abs(vals)))
    return {
        "closed_form": params.closed_form,
        "quadrature": quad,
        "abs_error": abs(quad - params.closed_form),
        "delta": l1_copy_delta(params.beta),
        "N": N,
    }


def tg_profile_series(N: int, r: float, order: int) -> float:
    """The same profile from truncated Taylor coefficients (cross-check)."""
    f = Polynomial((0.0,) * N + (float(N),))
    c = tg_apply(f, LogKernel(1.0), order).coeffs
    return float(np.polynomial.polynomial.polyval(r, c).real)


def _interval_integral(N: int, a: float, b: float, m: int = 16) -> float:
    """GL quadrature of the profile on ``[a, b]``, split at dyadic radii."""
    cuts = [a]
    k = 1
    while True:
        e = 1.0 - 2.0**-k
        if e >= b or k > 60:
            break
        if e > a:
            cuts.append(e)
        k += 1
    cuts.append(b)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        x, w = gauss_legendre(m, lo, hi)
        total += float(w @ np.abs(l1_copy_profile(N, x)))
    return total


def l1_copy_intervals(beta: int, length: int, max_exponent: int = 40) -> dict:
    """Choose radii ``r_k`` and indices ``n_k`` and verify the two interval estimates.

    ``r_k`` is the first radius ``1 - 2^-j`` past ``r_{k-1}`` whose tail of
    ``f_{n_k}`` is below ``delta/4`` (``delta/2`` for ``k = 1``); ``n_{k+1}`` is
    the first index whose mass on ``[0, r_k]`` is below ``delta/4``.
    """
    if length < 1:
        raise ValueError("need at least one interval")
    delta = l1_copy_delta(beta)
    total = lambda N: N / (N + 1)
    A = lambda N, r: float(l1_copy_antiderivative(N, r))
    ns, rs = [1], [0.0]
    for k in range(length):
        N = beta ** ns[-1]
        bound = delta / 2 if k == 0 else delta / 4
        j = 1
        while 1.0 - 2.0**-j <= rs[-1] or total(N) - A(N, 1.0 - 2.0**-j) >= bound:
            j += 1
            if j > 50:
                raise ArithmeticError("radius sequence left double precision")
        rs.append(1.0 - 2.0**-j)
        if k == length - 1:
            break
        n = ns[-1] + 1
        while A(beta**n, rs[-1]) >= delta / 4:
            n += 1
            if n > max_exponent:
                raise ArithmeticError("index sequence exceeded max_exponent")
        ns.append(n)
    checks = []
    for k, n in enumerate(ns):
        N = beta**n
        inside = _interval_integral(N, rs[k], rs[k + 1])
        outside = _interval_integral(N, 0.0, rs[k]) + _interval_integral(N, rs[k + 1], rs[-1])
        checks.append(
            {
                "n": n,
                "interval": [rs[k], rs[k + 1]],
                "inside": inside,
                "outside": outside,
                "inside_ok": inside > delta,
                "outside_ok": outside < delta / 2,
            }
        )
    return {
        "delta": delta,
        "indices": ns,
        "radii": rs,
        "checks": checks,
        "holds": all(c["inside_ok"] and c["outside_ok"] for c in checks),
    }


# -- u_k kernels -------------------------------------------------------------------------


@dataclass(frozen=True)
class UkParams:
    eps: float
    a: float = 0.0

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")


def uk_spec(params: UkParams) -> RationalPower:
    """``eps^2 / (z - (1+eps) e^{ia})^3`` as a rational power kernel."""
    pole = (1 + params.eps) * complex(math.cos(params.a), math.sin(params.a))
    return RationalPower(pole, 3.0, -params.eps**2)


def _uk_modulus(params: UkParams, r: np.ndarray, theta: float) -> np.ndarray:
    # |z - w|^2 = (R - r)^2 + 4 R r sin^2(phi/2) with R = 1 + eps, stable near the peak
    R = 1 + params.eps
    s = math.sin((theta - params.a) / 2)
    gap = params.eps + (1 - r)
    d2 = gap**2 + 4 * R * r * s * s
    return params.eps**2 * d2**-1.5


def _uk_rule(eps: float) -> DiscGrid:
    depth = max(16, int(math.ceil(math.log2(1 / eps))) + 12)
    return build_grid(8, depth, 12, closing=True)


def uk_phi(params: UkParams, theta: float, grid: DiscGrid | None = None) -> float:
    """``int_0^1 |u(r e^{i theta})| dr`` by graded radial quadrature."""
    d = (theta - params.a + math.pi) % (2 * math.pi) - math.pi
    if abs(abs(theta - params.a) - math.pi) < 1e-12:
        d = math.pi
    if abs(d) > math.pi + 1e-12:
        raise ValueError("|theta - a| must not exceed pi")
    rule = (grid or _uk_rule(params.eps)).rule
    return float(rule.radial_weights @ _uk_modulus(params, rule.radii, theta))


def uk_phi_closed_form(eps: float) -> float:
    """Value at ``theta = a``: ``1/2 - eps^2 / (2 (1+eps)^2)``."""
    return 0.5 - eps**2 / (2 * (1 + eps) ** 2)


def claim_check(eps_values: Sequence[float], offsets: Sequence[float], grid: DiscGrid | None = None, tol: float = 1e-9) -> dict:
    """``max (phi - min{1, 8 eps^2 / |theta - a|^2})`` over the product grid."""
    worst = -math.inf
    where = None
    for eps in eps_values:
        params = UkParams(float(eps))
        g = grid or _uk_rule(eps)
        for off in offsets:
            phi = uk_phi(params, float(off), g)
            bound = 1.0 if off == 0 else min(1.0, 8 * eps**2 / off**2)
            v = phi - bound
            if v > worst:
                worst, where = v, (float(eps), float(off))
    return {"max_violation": worst, "argmax": where, "holds": worst <= tol}


# -- c0 kernels --------------------------------------------------------------------------


def c0_constants(p: float) -> dict:
    """``C2 = 4^3 ((2p+1)^{1/p} + 1) / p^{1/p}``, ``C3 = 2^{2+1/p}``, ``beta_max = 1/(1+2^{4+1/p})``."""
    return {
        "C2": 64 * ((2 * p + 1) ** (1 / p) + 1) / p ** (1 / p),
        "C3": 2 ** (2 + 1 / p),
        "beta_max": 1 / (1 + 2 ** (4 + 1 / p)),
    }


@dataclass(frozen=True)
class C0KernelParams:
    radii: tuple
    p: float
    beta: float
    rel_tol: float = 1e-12

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        object.__setattr__(self, "radii", r)
        if not 1 <= self.p < math.inf:
            raise ValueError("p must be finite and >= 1")
        if not 0 < self.beta < c0_constants(self.p)["beta_max"]:
            raise ValueError("beta must lie in (0, 1/(1+2^{4+1/p}))")
        if not r or any(not 0.5 <= x < 1 for x in r):
            raise ValueError("radii must lie in [1/2, 1)")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("radii must be strictly increasing")
        gaps = self.gaps
        for n in range(1, len(r)):
            if gaps[n] / gaps[n - 1] > self.beta / n**2 * (1 + self.rel_tol):
                raise ValueError(f"separation (1-r_{n+1})/(1-r_{n}) <= beta/{n}^2 fails")

    @property
    def gaps(self) -> tuple:
        return tuple(1.0 - x for x in self.radii)


def admissible_radii(
    terms: int, p: float, eps1: float = 0.1, beta: float | None = None, shrink: float | None = None
) -> C0KernelParams:
    """Radii with ``1 - r_{n+1} = (1 - r_n) shrink / n^2``.

    ``beta`` defaults to ``1/(2 + 2^{4+1/p})`` and ``shrink`` to ``0.9 beta``;
    the margin absorbs rounding in ``1 - r`` for radii very close to 1.
    """
    if terms < 1:
        raise ValueError("need at least one term")
    b = beta if beta is not None else 1 / (2 + 2 ** (4 + 1 / p))
    k = shrink if shrink is not None else 0.9 * b
    eps = [eps1]
    for n in range(1, terms):
        eps.append(eps[-1] * k / n**2)
    if eps[-1] < 2.0**-40:
        raise ValueError("radii closer to 1 than double precision supports")
    return C0KernelParams(tuple(1.0 - e for e in eps), p, b)


def c0_kernel(n: int, params: C0KernelParams, direction: float = 0.0) -> RationalPower:
    """``f_n(z) = (1 - r_n) (1 - conj(z_n) z)^{-(2+1/p)}`` with ``z_n = r_n e^{i a}``."""
    r = params.radii[n]
    zn = r * complex(math.cos(direction), math.sin(direction))
    t = 2 + 1 / params.p
    pole = 1 / zn.conjugate()
    return RationalPower(pole, t, (1 - r) * pole**t)


def c0_modulus(n: int, params: C0KernelParams, rho, theta, direction: float = 0.0) -> np.ndarray:
    """``|f_n(rho e^{i theta})|`` as a ``(len rho, len theta)`` array, from gaps.

    ``|1 - r_n rho e^{i phi}|^2 = (eps_n + r_n (1 - rho))^2 + 4 r_n rho sin^2(phi/2)``.
    """
    eps, r = params.gaps[n], params.radii[n]
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    s = np.sin((np.atleast_1d(np.asarray(theta, dtype=float)) - direction) / 2)
    gap = eps + r * (1 - rho)
    d2 = gap[:, None] ** 2 + 4 * r * rho[:, None] * s[None, :] ** 2
    return eps * d2 ** (-(2 + 1 / params.p) / 2)


def c0_rho(n: int, params: C0KernelParams, extra_depth: int = 12, m: int = 12) -> dict:
    """``rho_{p,1}(f_n)`` on a rule graded at the kernel scale, and with two more shells."""
    eps = params.gaps[n]
    base = int(math.ceil(math.log2(1 / eps)))
    values = []
    for depth in (base + extra_depth, base + extra_depth + 2):
        rule = graded_rule(min(depth, 44), m, min(eps, 0.5), 0.0, closing=True, grading=1)
        mod = c0_modulus(n, params, rule.radii, rule.angles)
        radial = (rule.radial_weights @ mod**params.p) ** (1 / params.p)
        values.append(float(rule.angular_weights @ radial))
    return {"value": values[1], "error_estimate": abs(values[1] - values[0])}


def c0_constant_checks(params: C0KernelParams, tol: float = 1e-9) -> dict:
    if len(params.radii) < 3:
        raise ValueError("at least three radii are required")
    const = c0_constants(params.p)
    C2, C3 = const["C2"], const["C3"]
    K = len(params.radii)
    e = 1 + 1 / params.p
    rhos = [c0_rho(n, params) for n in range(K)]
    # table[m][k] = |f_m(z_k)| (1 - r_k)^{1+1/p}
    table = [
        [float(c0_modulus(m, params, params.radii[k], 0.0)[0, 0]) * params.gaps[k] ** e for k in range(K)]
        for m in range(K)
    ]
    diag = [table[m][m] for m in range(K)]
    formula = [1 / (1 + r) ** (2 + 1 / params.p) for r in params.radii]
    offdiag = [math.fsum(table[m][k] for k in range(K) if k != m) for m in range(K)]
    return {
        "C2": C2,
        "C3": C3,
        "rho": [x["value"] for x in rhos],
        "rho_error": [x["error_estimate"] for x in rhos],
        "diagonal": diag,
        "diagonal_formula": formula,
        "diagonal_max_error": max(abs(a - b) for a, b in zip(diag, formula)),
        "offdiag_sums": offdiag,
        "rho_bound_ok": all(x["value"] <= C2 for x in rhos),
        "diagonal_ok": all(d >= 1 / C3 for d in diag),
        "offdiag_ok": all(s <= 1 / (2 * C3) + tol for s in offdiag),
    }

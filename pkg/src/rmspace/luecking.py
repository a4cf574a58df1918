"""Dyadic annulus-sector decomposition of the disc and its maximal operators.

Region ``(n, j)`` is ``1 - 2**-n <= |z| < 1 - 2**-(n+1)`` with
``arg z`` in ``[2 pi j / 2**n, 2 pi (j+1) / 2**n)``.  Two regions are
contiguous when their closures meet, corners included; this gives 3, 7 and 9
contiguous regions (self included) at levels 0, 1 and n >= 2.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .norms import PQPair, rho_field, rho_value
from .quadrature import DiscGrid, gauss_legendre
from .series import FunctionSpec, evaluate, evaluate_polar

__all__ = [
    "DepthError",
    "LueckingIndex",
    "RegionField",
    "ring",
    "sector",
    "region_of",
    "region_area",
    "neighbors",
    "nc_count",
    "expanded_area",
    "region_integrals",
    "maximal_R",
    "maximal_Rtilde",
    "adjoint_field",
    "adjoint_constants",
    "maximal_D",
    "domination_constant",
    "domination_check",
    "maximal_covered",
    "maximal_bound_experiment",
    "disc_inclusion_check",
    "mean_value_box_check",
    "dump_csv",
]

TWO_PI = 2 * math.pi


class DepthError(ValueError):
    """Index or point beyond the decomposition depth."""


class LueckingIndex(NamedTuple):
    n: int
    j: int


def _index(idx) -> LueckingIndex:
    n, j = int(idx[0]), int(idx[1])
    if n < 0 or not 0 <= j < 2**n:
        raise ValueError(f"invalid region index ({n}, {j})")
    return LueckingIndex(n, j)


def ring(n: int) -> tuple[float, float]:
    return 1.0 - 2.0**-n, 1.0 - 2.0 ** -(n + 1)


def sector(n: int, j: int) -> tuple[float, float]:
    return TWO_PI * j / 2**n, TWO_PI * (j + 1) / 2**n


def region_of(z: complex, L: int) -> LueckingIndex:
    z = complex(z)
    a = abs(z)
    if not a < 1.0 - 2.0**-L:
        raise DepthError(f"|z| = {a} lies beyond depth {L}")
    n = 0
    while a >= 1.0 - 2.0 ** -(n + 1):
        n += 1
    theta = math.atan2(z.imag, z.real) % TWO_PI
    k = 2**n
    j = min(int(theta * k / TWO_PI), k - 1)
    # settle float edge cases against the displayed half-open bounds
    while j > 0 and theta < TWO_PI * j / k:
        j -= 1
    while j < k - 1 and theta >= TWO_PI * (j + 1) / k:
        j += 1
    return LueckingIndex(n, j)


def region_area(idx) -> float:
    n, _ = _index(idx)
    return math.pi * 4.0**-n * (1 - 3 * 2.0 ** -(n + 2))


def _neighbors(n: int, j: int) -> list[LueckingIndex]:
    if n == 0:
        out = {(0, 0), (1, 0), (1, 1)}
    elif n == 1:
        out = {(1, 0), (1, 1), (0, 0)} | {(2, k) for k in range(4)}
    else:
        k, kin, kout = 2**n, 2 ** (n - 1), 2 ** (n + 1)
        parent = j // 2
        corner = parent - 1 if j % 2 == 0 else parent + 1
        out = {(n, j), (n, (j - 1) % k), (n, (j + 1) % k)}
        out |= {(n - 1, parent), (n - 1, corner % kin)}
        out |= {(n + 1, (2 * j + d) % kout) for d in (-1, 0, 1, 2)}
    return sorted(LueckingIndex(*t) for t in out)


def neighbors(idx, L: int | None = None) -> list[LueckingIndex]:
    """Regions whose closure meets that of ``idx``, itself included."""
    n, j = _index(idx)
    if L is not None and n >= L - 1:
        raise DepthError(f"neighbors of level {n} need depth > {n + 1}, got {L}")
    return _neighbors(n, j)


def nc_count(idx) -> int:
    return len(_neighbors(*_index(idx)))


def expanded_area(idx) -> float:
    return math.fsum(region_area(b) for b in _neighbors(*_index(idx)))


def _level_area(n: int) -> float:
    return math.pi * 4.0**-n * (1 - 3 * 2.0 ** -(n + 2))


def _level_expanded_area(n: int) -> float:
    return expanded_area((n, 0))


# -- region integrals ---------------------------------------------------------------

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _as_field(f) -> Field:
    if callable(f):
        return f
    return lambda r, t: np.abs(evaluate_polar(f, r, t))


def region_integrals(f, L: int, m: int = 8) -> list[np.ndarray]:
    """``int_{R_{n,j}} |f| dm2`` for ``n = 0..L-1``; entry ``n`` has shape ``(2**n,)``.

    Tensor Gauss-Legendre of order ``m`` in ``r`` (with the Jacobian ``r``)
    and ``theta``; sectors at levels below 3 are split into ``2**(3-n)``
    angular pieces.
    """
    field = _as_field(f)
    x, w = np.polynomial.legendre.leggauss(m)
    out = []
    for n in range(L):
        lo, hi = ring(n)
        r, wr = gauss_legendre(m, lo, hi)
        pieces = 2 ** max(0, 3 - n)
        count = 2**n * pieces
        h = TWO_PI / count
        t = (np.arange(count)[:, None] * h + 0.5 * h * (x[None, :] + 1)).ravel()
        vals = np.asarray(field(r, t), dtype=float)
        radial = (wr * r) @ vals
        per_piece = radial.reshape(count, m) @ (0.5 * h * w)
        out.append(per_piece.reshape(2**n, pieces).sum(axis=1))
    return out


@dataclass(frozen=True, eq=False)
class RegionField:
    """A nonnegative field, constant on each region ``(n, j)`` with ``n < depth``,
    zero beyond the depth."""

    depth: int
    values: tuple

    def __post_init__(self):
        vals = tuple(np.asarray(v, dtype=float) for v in self.values)
        if len(vals) != self.depth:
            raise ValueError("one array per level is required")
        for n, v in enumerate(vals):
            if v.shape != (2**n,):
                raise ValueError(f"level {n} needs {2**n} values")
            if np.any(v < 0):
                raise ValueError("region fields are nonnegative")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, idx) -> float:
        n, j = _index(idx)
        return float(self.values[n][j])

    def at(self, z: complex) -> float:
        try:
            n, j = region_of(z, self.depth)
        except DepthError:
            return 0.0
        return float(self.values[n][j])

    def sample(self, r: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Values on a polar tensor grid, vectorized."""
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float) % TWO_PI
        out = np.zeros((r.size, t.size))
        for i, rr in enumerate(r):
            if rr >= 1.0 - 2.0**-self.depth:
                continue
            n = 0
            while rr >= 1.0 - 2.0 ** -(n + 1):
                n += 1
            j = np.minimum((t * 2**n / TWO_PI).astype(int), 2**n - 1)
            out[i] = self.values[n][j]
        return out

    def rho(self, pq: PQPair) -> float:
        """Exact rho_{p,q} of the piecewise-constant extension."""
        L = self.depth
        fine = 2 ** (L - 1)
        k = np.arange(fine)
        cols = [self.values[n][k >> (L - 1 - n)] for n in range(L)]
        V = np.stack(cols)  # (L, fine): value seen by sector k at level n
        if math.isinf(pq.p):
            radial = V.max(axis=0)
        else:
            widths = 2.0 ** -(np.arange(L) + 1)
            radial = (widths @ V**pq.p) ** (1 / pq.p)
        if math.isinf(pq.q):
            return float(radial.max())
        return float(np.mean(radial**pq.q) ** (1 / pq.q))

    def to_dict(self) -> dict:
        return {"depth": self.depth, "values": [[float(x) for x in v] for v in self.values]}


def maximal_R(f, L: int, m: int = 8, integrals=None) -> RegionField:
    I = integrals or region_integrals(f, L, m)
    return RegionField(L, tuple(I[n] / _level_area(n) for n in range(L)))


def _expanded_sums(I: list[np.ndarray], n: int) -> np.ndarray:
    return np.array([math.fsum(I[b.n][b.j] for b in _neighbors(n, j)) for j in range(2**n)])


def maximal_Rtilde(f, L: int, m: int = 8, integrals=None) -> RegionField:
    """Means over expanded regions, placed on the regions themselves.

    Integrals are needed one level deeper than the field.
    """
    I = integrals or region_integrals(f, L + 1, m)
    if len(I) < L + 1:
        raise DepthError("expanded means need integrals to level L")
    return RegionField(L, tuple(_expanded_sums(I, n) / _level_expanded_area(n) for n in range(L)))


def adjoint_field(f, L: int, m: int = 8, integrals=None) -> RegionField:
    """``sum beta_n (mean over R_{n,j}) chi of the expanded region``, read on each region."""
    I = integrals or region_integrals(f, L + 1, m)
    vals = []
    for n in range(L):
        vals.append(
            np.array(
                [
                    math.fsum(I[b.n][b.j] / _level_expanded_area(b.n) for b in _neighbors(n, j))
                    for j in range(2**n)
                ]
            )
        )
    return RegionField(L, tuple(vals))


def adjoint_constants(L: int) -> tuple[float, float]:
    """``K1, K2`` with ``K1 * M_Rtilde f <= adjoint f <= K2 * M_Rtilde f`` for f >= 0."""
    ratios = [
        _level_expanded_area(n) / _level_expanded_area(b.n)
        for n in range(L)
        for b in _neighbors(n, 0)
    ]
    return min(ratios), max(ratios)


# -- hyperbolic-disc averages ------------------------------------------------------------

_MD_ORDER = 16


def maximal_D(f, points) -> np.ndarray:
    """Mean of ``|f|`` over ``D(z, (1-|z|)/2)`` for each point, 16 x 16 polar nodes."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if np.any(np.abs(pts) >= 1):
        raise ValueError("points must lie in the open disc")
    s, ws = gauss_legendre(_MD_ORDER, 0.0, 1.0)
    phi = TWO_PI * np.arange(_MD_ORDER) / _MD_ORDER
    offsets = (s[:, None] * np.exp(1j * phi)[None, :]).ravel()
    weights = np.repeat(2 * ws * s, _MD_ORDER) / _MD_ORDER  # sums to 1 over the unit disc
    R = (1 - np.abs(pts)) / 2
    nodes = pts[:, None] + R[:, None] * offsets[None, :]
    if callable(f):
        vals = np.asarray(f(nodes), dtype=float)
    else:
        vals = np.abs(evaluate(f, nodes))
    return vals @ weights


def domination_constant(L: int) -> float:
    """``max_n m2(expanded R_n) / m2(D(z, (1-|z|)/2))`` over ``z`` in level ``n < L``."""
    # the smallest disc in level n sits at |z| -> 1 - 2^{-(n+1)}, radius 2^{-(n+2)}
    return max(_level_expanded_area(n) / (math.pi * 4.0 ** -(n + 2)) for n in range(L))


def domination_check(f, L: int, grid: DiscGrid, m: int = 8) -> dict:
    """``M_D f(z) <= K M_Rtilde f(z)`` at every grid node below depth ``L``."""
    Mt = maximal_Rtilde(f, L, m)
    K = domination_constant(L)
    r = grid.radii[grid.radii < 1.0 - 2.0**-L]
    t = grid.angles
    z = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    md = maximal_D(f, z)
    mt = Mt.sample(r, t).ravel()
    worst = float(np.max(md - K * mt))
    ratio = float(np.max(md / (K * mt))) if np.all(mt > 0) else math.inf
    return {"holds": worst <= 1e-12 * max(1.0, float(md.max())), "K": K, "max_ratio": ratio, "nodes": int(z.size)}


# -- boundedness experiments ----------------------------------------------------------------


class CoverageError(ValueError):
    """The (p, q) pair lies outside the proven range for the operator."""


def maximal_covered(operator: str, pq: PQPair) -> bool:
    p, q = pq.p, pq.q
    low = 1 <= p <= q < math.inf
    if operator == "R":
        return low
    if operator in ("Rtilde", "D"):
        return low or (1 < q <= p)
    raise ValueError(f"unknown maximal operator {operator!r}")


def maximal_bound_experiment(
    corpus: Sequence[FunctionSpec],
    pq: PQPair,
    grid: DiscGrid,
    L: int | None = None,
    operator: str = "R",
    experimental: bool = False,
) -> dict:
    """``sup_f rho(M f) / rho(f)`` over a corpus; rho(f) on ``grid``."""
    covered = maximal_covered(operator, pq)
    if not covered and not experimental:
        raise CoverageError(f"M_{operator} is not covered at {pq.label()}; pass experimental")
    L = grid.shell_depth if L is None else L
    m = grid.nodes_per_panel
    ratios = []
    for f in corpus:
        den = rho_value(f, pq, grid)
        if operator == "R":
            num = maximal_R(f, L, m).rho(pq)
        elif operator == "Rtilde":
            num = maximal_Rtilde(f, L, m).rho(pq)
        else:
            def md_field(r, t, f=f):
                z = r[:, None] * np.exp(1j * t)[None, :]
                return maximal_D(f, z.ravel()).reshape(z.shape)

            num = rho_field(md_field, pq, grid)
        ratios.append(num / den if den > 0 else 0.0)
    k = int(np.argmax(ratios)) if ratios else -1
    return {
        "operator": operator,
        "pq": pq.label(),
        "sup_ratio": float(ratios[k]) if ratios else 0.0,
        "argmax": k,
        "ratios": [float(x) for x in ratios],
        "covered": covered,
        "depth": L,
    }


# -- geometry audits -----------------------------------------------------------------------


def disc_inclusion_check(z: complex, L: int, samples: int = 256) -> bool:
    """Boundary samples of ``D(z, (1-|z|)/2)`` all fall in the expanded region of ``z``."""
    z = complex(z)
    home = region_of(z, L)
    allowed = set(_neighbors(*home))
    R = (1 - abs(z)) / 2
    for k in range(samples):
        w = z + R * cmath.exp(1j * TWO_PI * k / samples)
        if region_of(w, L + 2) not in allowed:
            return False
    return region_of(z, L) in allowed


def mean_value_box_check(c: float, z: complex, lam: float, samples: int = 256) -> bool:
    """``D(z, lam c (1-|z|))`` inside ``[r +- c(1-r)] x [theta +- c(1-r)]``."""
    z = complex(z)
    r = abs(z)
    if not 0 < c < 0.5:
        raise ValueError("c must lie in (0, 1/2)")
    if not 0.5 <= r < 1:
        raise ValueError("|z| must lie in [1/2, 1)")
    if not 0 < lam < 1 / math.sqrt(4 + c * c):
        raise ValueError(f"lambda must lie in (0, 1/sqrt(4+c^2)), got {lam}")
    theta = cmath.phase(z)
    h = c * (1 - r)
    rad = lam * c * (1 - r)
    for k in range(samples):
        w = z + rad * cmath.exp(1j * TWO_PI * k / samples)
        dt = (cmath.phase(w) - theta + math.pi) % TWO_PI - math.pi
        if not (r - h <= abs(w) <= r + h and abs(dt) <= h):
            return False
    return True


def dump_csv(L: int, target=None) -> str:
    if L < 1:
        raise ValueError("depth must be positive")
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "j", "r_lo", "r_hi", "theta_lo", "theta_hi", "area", "nc_count"])
    for n in range(L):
        lo, hi = ring(n)
        area = _level_area(n)
        nc = len(_neighbors(n, 0))
        for j in range(2**n):
            t0, t1 = sector(n, j)
            wr.writerow([n, j, repr(lo), repr(hi), repr(t0), repr(t1), repr(area), nc])
    text = buf.getvalue()
    if target is not None:
        with open(target, "w", newline="") as fh:
            fh.write(text)
    return text

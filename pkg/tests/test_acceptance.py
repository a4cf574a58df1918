"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the summary alone, or
``pytest tests/test_acceptance.py -v -s``.
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

from rmspace.corpus import random_polynomials
from rmspace.extremal import (
    L1CopyParams,
    UkParams,
    admissible_radii,
    c0_constant_checks,
    claim_check,
    l1_copy_integral,
    lacunary_equiv,
    uk_phi,
    uk_phi_closed_form,
)
from rmspace.littlewood_paley import lp_check_1d, lp_check_many
from rmspace.luecking import (
    domination_check,
    maximal_bound_experiment,
    nc_count,
    region_area,
)
from rmspace.norms import PQPair, delta_norm_lower, delta_prime_norm_lower, loglog_slope
from rmspace.operators import diagnose_symbol, Verdict
from rmspace.quadrature import build_grid
from rmspace.series import LogKernel

BASELINES = json.loads((Path(__file__).with_name("baselines.json")).read_text())


def _line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print("\n" + _line(n, ok, detail))
        assert ok, detail

    return emit


def check_1():
    grid = build_grid()
    pairs = [PQPair(p, q) for p in (1, 2, 3) for q in (1, 2, math.inf)]
    worst, failures = math.inf, 0
    for f in random_polynomials(200):
        for rep in lp_check_many(f, pairs, grid, tolerance=1e-6):
            failures += not rep.holds
            worst = min(worst, rep.slack + rep.tolerance)
    return failures == 0, f"200 polynomials x 9 pairs, failures={failures}, min margin={worst:.3g}"


def check_2():
    grid = build_grid(closing=True)
    f = (lambda r: -np.log1p(-r), lambda r: 1 / (1 - r))
    rep = lp_check_1d(f, 1, grid)
    err = max(abs(rep.lhs - 1), abs(rep.rhs - 1))
    return err <= 5e-5, f"lhs={rep.lhs:.12f} rhs={rep.rhs:.12f} max|side-1|={err:.2e}"


def check_3():
    grid = build_grid(256, 20, 8, closing=True)
    errs = [l1_copy_integral(L1CopyParams(2, n), grid)["abs_error"] for n in range(1, 11)]
    return max(errs) <= 1e-6, f"beta=2, n=1..10, max error={max(errs):.2e}"


def check_4():
    L = 16
    counts_ok = nc_count((0, 0)) == 3 and nc_count((1, 1)) == 7
    counts_ok &= all(nc_count((n, j)) == 9 for n in range(2, L) for j in (0, 2 ** (n - 1), 2**n - 1))
    total = math.fsum(region_area((n, j)) for n in range(L) for j in range(2**n))
    sum_err = abs(total - math.pi * (1 - 2.0**-L) ** 2)
    scaled = max(abs(region_area((n, 0)) * 4.0**n - math.pi * (1 - 3 * 2.0 ** -(n + 2))) for n in range(L))
    ok = counts_ok and sum_err <= 1e-12 and scaled <= 1e-12
    return ok, f"NC counts ok={counts_ok}, area sum error={sum_err:.1e}, scaled area error={scaled:.1e}"


def check_5():
    eps = [2.0**-k for k in range(3, 11)]
    offsets = [math.pi * k / 64 for k in range(1, 65)]
    res = claim_check(eps, offsets, tol=1e-9)
    peak = max(abs(uk_phi(UkParams(e), 0.0) - uk_phi_closed_form(e)) for e in eps)
    ok = res["holds"] and peak <= 1e-10
    return ok, f"max excess={res['max_violation']:.2e}, peak closed-form error={peak:.1e}"


def check_6():
    params = admissible_radii(4, 1, eps1=0.1, beta=1 / 40, shrink=1 / 50)
    res = c0_constant_checks(params, tol=1e-9)
    ok = res["rho_bound_ok"] and res["diagonal_ok"] and res["offdiag_ok"] and res["C2"] == 256
    return ok, (
        f"max rho={max(res['rho']):.4f} (<=256), diagonal error={res['diagonal_max_error']:.1e}, "
        f"max off-diagonal sum={max(res['offdiag_sums']):.4f} (<=1/16)"
    )


def check_7():
    grid = build_grid(4096, 16, 8)
    exps = [2**k for k in range(11)]
    ones = [1.0] * len(exps)
    ratios, drift = [], 0.0
    for q in (1, 2, math.inf):
        pq = PQPair(1, q)
        r1 = lacunary_equiv(exps, ones, pq, grid)["ratio"]
        r10 = lacunary_equiv(exps, [10.0] * len(exps), pq, grid)["ratio"]
        ratios.append(r1)
        drift = max(drift, abs(r10 - r1))
    width = max(ratios) / min(ratios)
    ok = width <= 4 and drift <= 1e-12
    return ok, f"ratios={[round(r, 4) for r in ratios]}, bracket width={width:.3f}, scaling drift={drift:.1e}"


def check_8():
    grid = build_grid()
    d = diagnose_symbol(LogKernel(1), grid)
    semi = d.bloch_seminorm.value
    ok = abs(semi - 2) <= 1e-3 and (d.in_B, d.in_B0, d.in_B0w) == (Verdict.YES, Verdict.NO, Verdict.YES)
    corpus_ok = all(diagnose_symbol(f, grid).in_B0 is Verdict.YES for f in random_polynomials(50))
    return ok and corpus_ok, (
        f"-log(1-z): seminorm={semi:.6f}, verdicts={d.in_B.value}/{d.in_B0.value}/{d.in_B0w.value}; "
        f"50 polynomials in B0: {corpus_ok}"
    )


def check_9():
    cal = BASELINES["duality_calibration"]
    grid = build_grid(*cal["grid"])
    pq = PQPair(2, 2)
    rs = cal["radii"]
    d = [delta_norm_lower(pq, r, grid=grid) for r in rs]
    dp = [delta_prime_norm_lower(pq, r, grid=grid) for r in rs]
    slope = loglog_slope([1 / (1 - r) for r in rs], d)
    ratio = [b / a for a, b in zip(d, dp)]
    doublings = [ratio[k + 1] / ratio[k] for k in range(len(ratio) - 1)]
    lo, hi = cal["slope_bracket"]
    dlo, dhi = cal["doubling_bracket"]
    ok = lo <= slope <= hi and all(dlo <= x <= dhi for x in doublings)
    return ok, f"delta slope={slope:.4f}, ratio doublings={[round(x, 3) for x in doublings]}"


def check_10():
    grid = build_grid()
    corpus = random_polynomials(50)
    res = maximal_bound_experiment(corpus, PQPair(2, 2), grid)
    base = BASELINES["maximal_R_sup_ratio_2_2"]
    sup = res["sup_ratio"]
    reg_ok = math.isfinite(sup) and abs(sup - base) <= 1e-9 and sup <= base * 1.0 + 1e-15
    dom = [domination_check(f, 8, grid, 8) for f in corpus[:5]]
    dom_ok = all(r["holds"] for r in dom)
    return reg_ok and dom_ok, (
        f"sup_ratio={sup!r} baseline={base!r}; domination holds on {sum(r['holds'] for r in dom)}/{len(dom)} "
        f"(max ratio {max(r['max_ratio'] for r in dom):.3g}, K={dom[0]['K']:.1f})"
    )


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]


@pytest.mark.slow
@pytest.mark.parametrize("n", range(1, 11), ids=[f"criterion_{n}" for n in range(1, 11)])
def test_criterion(n, report):
    ok, detail = CHECKS[n - 1]()
    report(n, ok, detail)


if __name__ == "__main__":
    failed = 0
    for n, chk in enumerate(CHECKS, 1):
        ok, detail = chk()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)

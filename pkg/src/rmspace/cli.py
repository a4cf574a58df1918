"""Command-line front end.

Every report is a JSON document ``{"tool", "version", "config", "result"}``
with floats written to 17 significant digits.  Exit codes: 0 success,
2 a checked inequality failed, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .corpus import DEFAULT_SEED, random_polynomials
from .extremal import (
    L1CopyParams,
    admissible_radii,
    c0_constant_checks,
    claim_check,
    l1_copy_integral,
    l1_copy_intervals,
    lacunary_equiv,
    uk_phi,
    uk_phi_closed_form,
    UkParams,
)
from .littlewood_paley import (
    converse_covered,
    converse_ratio,
    lp_check,
    lp_check_many,
    lp_tail_check,
)
from .luecking import (
    disc_inclusion_check,
    dump_csv,
    maximal_bound_experiment,
    nc_count,
    neighbors,
    region_area,
)
from .norms import PQPair, boundary_decay_profile, parse_exponent, rho_pq, tail_profile
from .operators import (
    BcdeltaParams,
    Thresholds,
    bcdelta_verify,
    bloch_seminorm,
    diagnose_symbol,
    second_derivative_bound_check,
)
from .quadrature import build_grid
from .series import Lacunary, parse_spec, serialize, tg_apply

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- JSON with fixed float formatting ------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "value") and hasattr(obj, "name") and isinstance(getattr(obj, "value"), str):
        return json.dumps(obj.value)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- argument plumbing -------------------------------------------------------------------------


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hexadecimal seed: {text!r}")


def _exponent(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("grid and output")
    g.add_argument("--grid-angles", type=int, default=256, metavar="M", help="angular nodes, a power of two >= 8 (default 256)")
    g.add_argument("--grid-depth", type=int, default=16, metavar="L", help="dyadic radial shells; r_max = 1-2^-L (default 16)")
    g.add_argument("--grid-order", type=int, default=8, metavar="m", help="Gauss-Legendre nodes per shell (default 8)")
    g.add_argument("--closing-panel", action="store_true", help="add a graded panel on [r_max, 1) instead of truncating")
    g.add_argument("--tolerance", type=float, default=1e-6, help="absolute tolerance for inequality checks (default 1e-6)")
    g.add_argument("--seed", type=_hex, default=DEFAULT_SEED, metavar="HEX", help="corpus seed (default 5EED)")
    g.add_argument("--out", metavar="FILE", help="write the JSON report here instead of stdout")
    return common


def _pq_args(p: argparse.ArgumentParser, q_default: str = "2") -> None:
    p.add_argument("--p", type=_exponent, default=parse_exponent("2"), help="radial exponent in [1, inf]")
    p.add_argument("--q", type=_exponent, default=parse_exponent(q_default), help="angular exponent in [1, inf]")


def _load_spec(path: str | None):
    if path is None:
        raise UsageError("--spec FILE is required")
    with open(path) as fh:
        return parse_spec(json.load(fh))


def _grid(args):
    return build_grid(args.grid_angles, args.grid_depth, args.grid_order, args.closing_panel)


def _corpus_or_spec(args):
    if getattr(args, "corpus", None):
        return random_polynomials(args.corpus, args.seed), True
    return [_load_spec(args.spec)], False


# -- subcommands -------------------------------------------------------------------------------------


def cmd_norm(args):
    f = _load_spec(args.spec)
    grid = _grid(args)
    pq = PQPair(args.p, args.q)
    result = rho_pq(f, pq, grid).to_dict()
    if args.profile:
        if math.isinf(pq.p):
            raise UsageError("profiles need a finite --p")
        maker = tail_profile if args.profile == "tail" else boundary_decay_profile
        prof = maker(f, pq.p, grid)
        result["profile"] = prof.to_dict()
        if args.csv:
            prof.to_csv(args.csv)
    return result, True


def cmd_tg(args):
    f = _load_spec(args.spec)
    g = _load_spec(args.symbol)
    coeffs = tg_apply(f, g, args.order)
    pq = PQPair(args.p, args.q)
    rep = rho_pq(coeffs.to_polynomial(), pq, _grid(args))
    return {
        "order": coeffs.order,
        "coefficients": [[float(c.real), float(c.imag)] for c in coeffs.coeffs],
        "rho_truncated": rep.to_dict(),
    }, True


def cmd_bloch(args):
    g = _load_spec(args.spec)
    grid = _grid(args)
    result = {"seminorm": bloch_seminorm(g, grid).to_dict()}
    ok = True
    if args.second_derivative_bound is not None:
        chk = second_derivative_bound_check(g, args.second_derivative_bound, grid)
        result["second_derivative"] = chk
        ok &= chk["holds"]
    if args.bcdelta is not None:
        B, c, eta, a = args.bcdelta
        chk = bcdelta_verify(g, BcdeltaParams(B, c, eta, a))
        result["bcdelta"] = chk
        ok &= chk["verified"]
    return result, ok


def cmd_diagnose(args):
    g = _load_spec(args.spec)
    th = Thresholds(args.b0_eps, args.b0w_eps, args.measure)
    diag = diagnose_symbol(g, _grid(args), th)
    if args.csv:
        diag.little_bloch_profile.to_csv(args.csv)
    return diag.to_dict(), True


def cmd_lp_check(args):
    pq = PQPair(args.p, args.q)
    grid = _grid(args)
    if args.tail is not None:
        f = _load_spec(args.spec)
        rep = lp_tail_check(f, pq.p, args.tail, grid, args.theta, args.tolerance)
        return rep.to_dict(), rep.holds
    funcs, is_corpus = _corpus_or_spec(args)
    if is_corpus:
        reports = [lp_check_many(f, [pq], grid, args.tolerance)[0] for f in funcs]
    else:
        reports = [lp_check(funcs[0], pq, grid, args.tolerance)]
    failures = [k for k, r in enumerate(reports) if not r.holds]
    summary = {
        "count": len(reports),
        "failures": failures,
        "all_hold": not failures,
        "min_slack": min(r.slack for r in reports),
    }
    return {"reports": [r.to_dict() for r in reports], "summary": summary}, not failures


def cmd_converse(args):
    pq = PQPair(args.p, args.q)
    grid = _grid(args)
    funcs, _ = _corpus_or_spec(args)
    ratios, skipped = [], 0
    for f in funcs:
        try:
            ratios.append(converse_ratio(f, pq, grid, args.experimental)["ratio"])
        except ZeroDivisionError:
            skipped += 1
    running = list(np.maximum.accumulate(ratios)) if ratios else []
    return {
        "pq": pq.label(),
        "covered": converse_covered(pq),
        "experimental": not converse_covered(pq),
        "ratios": ratios,
        "running_max": running,
        "empirical_constant": running[-1] if running else None,
    }, True


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_lacunary(args):
    if args.spec:
        f = _load_spec(args.spec)
        if not isinstance(f, Lacunary):
            raise UsageError("the spec must be of kind 'lacunary'")
        exps, coeffs, ratio = f.exponents, f.coeffs, f.ratio
    else:
        if not args.exponents:
            raise UsageError("give --spec or --exponents")
        exps = [int(x) for x in _floats(args.exponents)]
        coeffs = _floats(args.coeffs) if args.coeffs else [1.0] * len(exps)
        ratio = None
    pq = PQPair(args.p, args.q)
    return lacunary_equiv(exps, coeffs, pq, _grid(args), ratio), True


def cmd_luecking(args):
    if args.action == "dump":
        text = dump_csv(args.depth, args.csv)
        rows = text.count("\n") - 1
        return {"depth": args.depth, "regions": rows, "csv": args.csv if args.csv else text}, True
    L = args.depth
    counts = {str(n): nc_count((n, 0)) for n in range(min(L, 4))}
    area_sum = math.fsum(region_area((n, j)) for n in range(L) for j in range(2**n))
    area_err = abs(area_sum - math.pi * (1 - 2.0**-L) ** 2)
    asym = [
        [list(a), list(b)]
        for n in range(L - 1)
        for j in range(2**n)
        for a in [(n, j)]
        for b in neighbors(a)
        if b.n < L - 1 and tuple(a) not in [tuple(x) for x in neighbors(b)]
    ]
    rng = np.random.default_rng(args.seed)
    incl_fail = 0
    for _ in range(args.samples):
        r = rng.uniform(0, 1 - 2.0**-L)
        z = r * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))
        incl_fail += not disc_inclusion_check(z, L)
    ok = counts.get("0", 3) == 3 and counts.get("1", 7) == 7 and all(
        v == 9 for k, v in counts.items() if int(k) >= 2
    )
    ok &= area_err <= 1e-12 and not asym and incl_fail == 0
    return {
        "nc_counts": counts,
        "area_sum_error": area_err,
        "asymmetric_pairs": asym,
        "inclusion_samples": args.samples,
        "inclusion_failures": incl_fail,
        "holds": bool(ok),
    }, ok


def cmd_maximal(args):
    pq = PQPair(args.p, args.q)
    grid = _grid(args)
    funcs, _ = _corpus_or_spec(args)
    res = maximal_bound_experiment(funcs, pq, grid, args.depth, args.operator, args.experimental)
    ok = True
    if args.baseline is not None:
        res["baseline"] = args.baseline
        ok = res["sup_ratio"] <= args.baseline
        res["regression"] = not ok
    return res, ok


def cmd_extremal(args):
    if args.action == "l1-copy":
        res = l1_copy_integral(L1CopyParams(args.beta, args.n), _grid(args))
        ok = res["abs_error"] <= args.tolerance if args.closing_panel else True
        if args.intervals:
            res["intervals"] = l1_copy_intervals(args.beta, args.intervals)
            ok &= res["intervals"]["holds"]
        return res, ok
    if args.action == "claim-check":
        eps = [2.0**-k for k in range(3, 11)]
        offsets = [math.pi * k / args.angles for k in range(1, args.angles + 1)]
        res = claim_check(eps, offsets)
        diag = {str(e): uk_phi(UkParams(e), 0.0) - uk_phi_closed_form(e) for e in eps}
        res["peak_errors"] = diag
        ok = res["holds"] and all(abs(v) <= 1e-10 for v in diag.values())
        return res, ok
    params = admissible_radii(args.terms, args.p)
    res = c0_constant_checks(params)
    res["radii"] = list(params.radii)
    res["beta"] = params.beta
    return res, res["rho_bound_ok"] and res["diagonal_ok"] and res["offdiag_ok"]


def cmd_corpus(args):
    funcs = random_polynomials(args.count, args.seed)
    return {"count": len(funcs), "seed": f"{args.seed:X}", "specs": [serialize(f) for f in funcs]}, True


# -- parser --------------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="rmspace", description="Mixed-norm spaces RM(p,q) of analytic functions on the disc: norms, inequalities and operator diagnostics.")
    parser.add_argument("--version", action="version", version=f"rmspace {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("norm", parents=[common], help="mixed norm rho_{p,q}", description="Mixed radial-angular norm rho_{p,q}(f), with optional RM(p,0) tail or boundary-decay profile.")
    _pq_args(p)
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--profile", choices=["tail", "decay"])
    p.add_argument("--csv", metavar="FILE", help="write the profile as CSV (rho,value,quantity)")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("tg", parents=[common], help="integration operator T_g f", description="Taylor coefficients of the integration operator T_g f = int_0^z f g', and the mixed norm of the truncation.")
    _pq_args(p)
    p.add_argument("--spec", required=True, metavar="FILE", help="the function f")
    p.add_argument("--symbol", required=True, metavar="FILE", help="the symbol g")
    p.add_argument("--order", type=int, default=128, help="truncation degree (default 128)")
    p.set_defaults(func=cmd_tg)

    p = sub.add_parser("bloch", parents=[common], help="Bloch seminorm and pointwise symbol estimates", description="Bloch seminorm sup (1-|z|^2)|g'(z)|, the second-derivative bound |g''| <= 4B/(1-|z|)^2 and the lower bound |g'| > c/eta near a large value of g'.")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--second-derivative-bound", type=float, metavar="B")
    p.add_argument("--bcdelta", type=float, nargs=4, metavar=("B", "C", "ETA", "A"))
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("diagnose", parents=[common], help="B / B0 / B0w classification", description="Classify a symbol against the Bloch space, the little Bloch space and the weakly little Bloch space (YES/NO/UNDECIDED at the grid horizon).")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--b0-eps", type=float, default=1e-2)
    p.add_argument("--b0w-eps", type=float, default=1e-2)
    p.add_argument("--measure", type=float, default=0.1)
    p.add_argument("--csv", metavar="FILE", help="write the radial Bloch profile as CSV")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("lp-check", parents=[common], help="Littlewood-Paley inequality with constant p", description="Check rho_{p,q}(f) <= p rho_{p,q}(f'(z)(1-|z|)) + |f(0)| for a spec or a seeded corpus, or its tail version along rays with --tail RHO.")
    _pq_args(p)
    p.add_argument("--spec", metavar="FILE")
    p.add_argument("--corpus", type=int, metavar="N")
    p.add_argument("--tail", type=float, metavar="RHO")
    p.add_argument("--theta", type=float, help="ray for --tail (default: worst over grid angles)")
    p.set_defaults(func=cmd_lp_check)

    p = sub.add_parser("converse", parents=[common], help="converse Littlewood-Paley ratios", description="Ratios rho_{p,q}(f'(z)(1-|z|)) / rho_{p,q}(f). Pairs outside the established cases need --experimental.")
    _pq_args(p)
    p.add_argument("--spec", metavar="FILE")
    p.add_argument("--corpus", type=int, metavar="N")
    p.add_argument("--experimental", action="store_true")
    p.set_defaults(func=cmd_converse)

    p = sub.add_parser("lacunary", parents=[common], help="lacunary norm equivalence", description="Compare rho_{p,q} of a lacunary series with the coefficient model (sum |a_k|^p / n_k)^{1/p}.")
    _pq_args(p, q_default="2")
    p.add_argument("--spec", metavar="FILE")
    p.add_argument("--exponents", help="comma-separated exponents")
    p.add_argument("--coeffs", help="comma-separated real coefficients")
    p.set_defaults(func=cmd_lacunary)

    p = sub.add_parser("luecking", parents=[common], help="dyadic region geometry", description="Geometry of the dyadic annulus-sector regions: CSV dump, or audits of contiguity counts, areas and disc inclusion.")
    p.add_argument("action", choices=["dump", "check"])
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--samples", type=int, default=1000, help="random points for the inclusion audit")
    p.add_argument("--csv", metavar="FILE")
    p.set_defaults(func=cmd_luecking)

    p = sub.add_parser("maximal", parents=[common], help="discrete maximal operators", description="Boundedness ratios rho(M f)/rho(f) for the region, expanded-region and hyperbolic-disc maximal operators.")
    _pq_args(p)
    p.add_argument("--operator", choices=["R", "Rtilde", "D"], default="R")
    p.add_argument("--spec", metavar="FILE")
    p.add_argument("--corpus", type=int, metavar="N")
    p.add_argument("--depth", type=int, help="region depth (default: --grid-depth)")
    p.add_argument("--baseline", type=float, help="fail (exit 2) if sup_ratio exceeds this value")
    p.add_argument("--experimental", action="store_true")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("extremal", parents=[common], help="explicit extremal constructions", description="l1-copy integrals beta^n/(1+beta^n), the kernel bound min{1, 8 eps^2/|theta-a|^2}, and the c0 kernel constants.")
    p.add_argument("action", choices=["l1-copy", "claim-check", "c0"])
    p.add_argument("--beta", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--intervals", type=int, default=0, help="also run the interval extraction with this many intervals")
    p.add_argument("--angles", type=int, default=64, help="offsets in (0, pi] for claim-check")
    p.add_argument("--p", type=_exponent, default=1.0)
    p.add_argument("--terms", type=int, default=4)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("corpus", parents=[common], help="seeded random polynomial corpus", description="Emit the seeded random polynomial corpus (degree <= 60, coefficients uniform on the unit square over k+1).")
    p.add_argument("--count", type=int, default=200)
    p.set_defaults(func=cmd_corpus)
    return parser


def _config(args) -> dict:
    skip = {"func", "out", "csv"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if k == "seed":
            v = f"{v:X}"
        cfg[k] = v
    return cfg


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required; see rmspace --help")
        result, ok = args.func(args)
        text = to_json({"tool": "rmspace", "version": __version__, "config": _config(args), "result": result}) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, TypeError, ArithmeticError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if ok else EXIT_CHECK


def main() -> None:
    sys.exit(run())

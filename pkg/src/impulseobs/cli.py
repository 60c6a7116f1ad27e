"""Command-line interface.

Exit codes: 0 observable / found / passed, 1 not observable / not found /
failed, 2 invalid input.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import io as sio
from .criteria import (
    CriterionInconsistency,
    ImpulseWitness,
    Strategy,
    build_obs_matrix,
    find_witness,
    is_impulse_observable,
    kernel_witnesses,
)
from .floatrank import float_rank
from .frequency import impulse_order, polynomial_witness_from_solution, solve_frequency
from .system import DescriptorError, DescriptorSystem
from .weierstrass import assemble, nilpotency_index, random_canonical

log = logging.getLogger("impulseobs")

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID = 0, 1, 2


def _vec(v) -> str:
    return "(" + ", ".join(sio.fmt_rational(x) for x in v) + ")"


def _poly_vec(ps) -> str:
    return "(" + ", ".join(str(p) for p in ps) + ")"


def _emit(doc, out: str | None) -> None:
    text = sio.dumps(doc)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        sio.write_atomic(out, text)


def _say(args, line: str = "") -> None:
    # when JSON owns stdout, the human summary moves to stderr
    stream = sys.stderr if getattr(args, "out", None) in (None, "-") and getattr(args, "_json", False) else sys.stdout
    print(line, file=stream)


def _load(args) -> tuple[DescriptorSystem, str | None]:
    return sio.load_system(args.system, approximate=args.approximate)


def describe_witness(w: ImpulseWitness) -> list[str]:
    lines = [f"order {w.order}, v = {_vec(w.v)}, P(s) = {_poly_vec(w.polynomial())}",
             "  coefficients, P(s) = sum_i (-s)^i p_i:"]
    lines += [f"    p_{i} = {_vec(p)}" for i, p in enumerate(w.coeffs)]
    lines.append("  coefficients, P(s) = sum_i s^i c_i:")
    lines += [f"    c_{i} = {_vec(c)}" for i, c in enumerate(w.power_coefficients())]
    return lines


# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    args._json = True
    sys_, name = _load(args)
    strategy = Strategy.parse(args.strategy)
    report = is_impulse_observable(sys_, strategy, workers=args.workers)
    doc = sio.report_to_json(report, sys_, name)
    if args.compare_float:
        rows = []
        for row in report.rank_table:
            M = build_obs_matrix(sys_, row.r + 2).matrix
            approx = float_rank(M, rtol=args.rtol)
            rows.append({"r": row.r, "exact": row.rank, "float": approx})
            if approx != row.rank:
                log.warning("float rank %d disagrees with exact rank %d at r=%d", approx, row.rank, row.r)
        exact_E, approx_E = sys_.rank_E, float_rank(sys_.E, rtol=args.rtol)
        doc["float_comparison"] = {"rank_E": {"exact": exact_E, "float": approx_E}, "rank_table": rows,
                                   "disagreements": sum(r["exact"] != r["float"] for r in rows)
                                   + (exact_E != approx_E)}
    _emit(doc, args.out)
    _say(args, f"system{' ' + name if name else ''}: n={sys_.n}, m={sys_.m}, rank E={sys_.rank_E}, "
               f"det(sE-A) = {sys_.det_pencil}")
    for row in report.rank_table:
        mark = "=" if row.rank == row.required else "!="
        _say(args, f"  r={row.r}: rank O_{row.r + 2} = {row.rank} {mark} {row.required}")
    if report.verdict:
        _say(args, f"impulse observable (strategy {strategy})")
        return EXIT_OK
    _say(args, f"NOT impulse observable (strategy {strategy})")
    for line in describe_witness(report.witness):
        _say(args, "  witness " + line if line.startswith("order") else line)
    return EXIT_NEGATIVE


def cmd_witness(args) -> int:
    sys_, _ = _load(args)
    top = sys_.n - 1 if args.max_order is None else args.max_order
    if not 0 <= top <= sys_.n - 1:
        raise DescriptorError(f"--max-order must lie in 0..{sys_.n - 1}")
    if args.all:
        found = kernel_witnesses(sys_, top)
    else:
        found = []
        for r in range(top + 1):
            w = find_witness(sys_, r)
            if w is not None:
                found = [w]
                break
    if not found:
        print(f"no unobservable impulse up to order {top}")
        return EXIT_NEGATIVE
    for w in found:
        for line in describe_witness(w):
            print(line)
    return EXIT_OK


def _parse_vector(text: str) -> list[Fraction]:
    parts = [p for p in text.replace(" ", "").strip("()[]").split(",") if p]
    try:
        return [sio.parse_rational(p) for p in parts]
    except sio.SystemFileError as exc:
        raise DescriptorError(f"--w: {exc}") from None


def cmd_solve(args) -> int:
    sys_, _ = _load(args)
    w = _parse_vector(args.w)
    sol = solve_frequency(sys_, w)
    order = impulse_order(sol.x_poly)
    print(f"w = {_vec(sol.w)}")
    print(f"denominator = {sol.denom}")
    if order is None:
        print("X_P = 0 (no impulse)")
    else:
        print(f"X_P = {_poly_vec(sol.x_poly)}, impulse order {order}")
    print("X_A = (" + ", ".join(f"({a})/({sol.denom})" if a else "0" for a in sol.x_proper_num) + ")")
    print(f"q = lim s X_A(s) = {_vec(sol.q)}")
    proper, poly = sol.output(sys_)
    zero = sol.output_is_zero(sys_)
    if zero:
        print("C X(s) = 0")
    else:
        terms = [f"({a})/({sol.denom}) + ({p})" if a else str(p) for a, p in zip(proper, poly)]
        print("C X(s) = (" + ", ".join(terms) + ") != 0")
    w_ = polynomial_witness_from_solution(sys_, sol)
    if w_ is not None:
        print("derived witness (w - q, X_P):")
        for line in describe_witness(w_):
            print("  " + line)
    return EXIT_OK


def cmd_gen(args) -> int:
    if min(args.n1, args.n2, args.m, args.bound) < 0 or args.n1 + args.n2 < 1:
        raise DescriptorError("need n1, n2, m, bound >= 0 and n1 + n2 >= 1")
    wd = random_canonical(args.seed, args.n1, args.n2, args.m, args.bound)
    sys_ = assemble(wd)
    name = f"gen-seed{args.seed}-n1{args.n1}-n2{args.n2}-m{args.m}"
    _emit(sio.system_to_json(sys_, name), args.out)
    sidecar = args.sidecar
    if sidecar is None and args.out not in (None, "-"):
        out = Path(args.out)
        sidecar = str(out.with_name(out.stem + ".canonical.json"))
    if sidecar:
        doc = {"seed": args.seed, "n1": wd.n1, "n2": wd.n2, "m": wd.m, "bound": args.bound,
               "h": nilpotency_index(wd.N) if wd.n2 else 0,
               "A1": sio.matrix_to_json(wd.A1), "N": sio.matrix_to_json(wd.N),
               "C1": sio.matrix_to_json(wd.C1), "C2": sio.matrix_to_json(wd.C2),
               "T": sio.matrix_to_json(wd.T), "S": sio.matrix_to_json(wd.S)}
        sio.write_atomic(sidecar, sio.dumps(doc))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .suites import SuiteResult, fixture_systems, run_all

    if args.trials == 0:
        results = []
    else:
        results = run_all(trials=args.trials, max_n=args.max_n, seed=args.seed)
    if args.inject_failure:
        results.append(SuiteResult("injected failure", trials=1, checks=1, failure="forced by --inject-failure",
                                   counterexample=fixture_systems()["S2"]))
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    if not failed:
        print(f"selftest passed ({len(results)} suites)")
        return EXIT_OK
    first = failed[0]
    if first.counterexample is not None:
        sio.write_atomic(args.artifact, sio.dumps(sio.system_to_json(first.counterexample, first.name)))
        print(f"first counterexample written to {args.artifact}")
    return EXIT_NEGATIVE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="impulseobs",
                                 description="Impulse observability of descriptor systems E x' = A x, y = C x.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def system_arg(p):
        p.add_argument("system", help="system JSON file with keys E, A, C")
        p.add_argument("--approximate", action="store_true",
                       help="accept JSON floats, read as the exact decimals they spell")

    p = sub.add_parser("check", help="decide impulse observability")
    system_arg(p)
    p.add_argument("--strategy", default="all", help="first, all, or r=K (default: all)")
    p.add_argument("--out", default=None, help="report file (default: standard output)")
    p.add_argument("--compare-float", action="store_true", help="also report SVD-based float ranks")
    p.add_argument("--rtol", type=float, default=None,
                   help="relative float-rank tolerance (default: max(rows, cols) * eps)")
    p.add_argument("--workers", type=int, default=None, help="threads for the per-order rank checks")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", help="print a minimal-order unobservable impulse")
    system_arg(p)
    p.add_argument("--max-order", type=int, default=None, help="highest order searched (default: n - 1)")
    p.add_argument("--all", action="store_true", help="print every kernel-basis witness up to --max-order")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("solve", help="frequency-domain response to an initial state")
    system_arg(p)
    p.add_argument("--w", required=True, help="initial state, comma-separated rationals, e.g. 0,1/2")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a system from random canonical data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--n2", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--out", default=None, help="system file (default: standard output)")
    p.add_argument("--sidecar", default=None,
                   help="canonical-data file (default: <out>.canonical.json when --out is a file)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="run the randomized cross-validation suites")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--artifact", default="selftest-counterexample.json")
    p.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DescriptorError, sio.SystemFileError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CriterionInconsistency as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # exit-code contract is total
        log.debug("unexpected failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())

"""permcomplex command line: verify, decompose, resolve, check."""

from __future__ import annotations

import argparse
import sys

from .. import exactla as la
from .. import homalg, rep
from . import serialize
from .scenarios import SCENARIOS, ScenarioConfig, run

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _emit(obj: dict, out: str | None) -> None:
    if out:
        serialize.write(out, obj)
    else:
        sys.stdout.write(serialize.dumps(obj))


def _error(msg: str) -> int:
    sys.stderr.write(f"error: {msg}\n")
    return EXIT_ERROR


def cmd_verify(args) -> int:
    cfg = ScenarioConfig(
        args.scenario,
        p=args.p,
        precision=args.precision,
        tower_max_k=args.tower_max_k,
        max_degree=args.max_degree,
        seed=args.seed,
        out=args.out,
    )
    report = run(cfg, timing=args.timing)
    if report.error is not None:
        # no report file for a rejected configuration
        sys.stdout.write(serialize.dumps(report.to_dict()))
        return _error(report.error)
    _emit(report.to_dict(), args.out)
    if not args.quiet:
        for c in report.checks:
            sys.stderr.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _load_module(path: str) -> rep.RepModule:
    obj = serialize.load(path)
    if not isinstance(obj, rep.RepModule):
        raise serialize.FormatError(f"{path} does not hold a module")
    return obj


def cmd_decompose(args) -> int:
    M = _load_module(args.module_file)
    if M.ring.mode == la.PRIME:
        M = rep.RepModule.from_generators(M.group, la.Truncation(M.ring.p, 1), M.gen_mats(), name=M.name)
    if M.ring.mode != la.TRUNCATION:
        return _error("decompose works over Z/p^m or F_p coefficients")
    if M.ring.m < 2:
        summands = homalg.decompose_once(M, seed=args.seed)
        out = {"module": M.name, "summands": [s.describe() for s in summands]}
    else:
        out = homalg.ks_decompose(M, seed=args.seed, basis_changes=args.basis_changes).to_dict()
        out["module"] = M.name
    _emit(out, args.out)
    return EXIT_PASS


def cmd_resolve(args) -> int:
    M = _load_module(args.module_file)
    if args.length < 0:
        return _error("--length must be non-negative")
    if M.ring.mode != la.PRIME:
        M = rep.reduce(M, la.PrimeField(M.ring.p))
    res = homalg.minimal_resolution(M, args.length)
    out = {
        "module": M.name,
        "group": M.group.name,
        "ranks": [P.rank for P in res.terms],
        "multiplicities": res.table.to_dict(),
    }
    _emit(out, args.out)
    return EXIT_PASS


def cmd_check(args) -> int:
    C = serialize.load(args.complex_file)
    if not isinstance(C, homalg.ChainComplex):
        return _error(f"{args.complex_file} does not hold a complex")
    if C.ring.mode != la.PLOCAL:
        return _error("exactness is checked over Z_(p) coefficients")
    cert = homalg.check_exact(C)
    out = {"complex": C.name, "ranks": C.ranks(), **cert.to_dict()}
    _emit(out, args.out)
    return EXIT_PASS if cert.exact else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permcomplex", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a registered scenario and write its report")
    v.add_argument("scenario", help=f"one of: {', '.join(SCENARIOS)}")
    v.add_argument("--p", type=int, default=3)
    v.add_argument("--precision", type=int, default=8, help="m in Z/p^m")
    v.add_argument("--tower-max-k", type=int, default=3)
    v.add_argument("--max-degree", type=int, default=6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="report path (default: stdout)")
    v.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    v.add_argument("--quiet", action="store_true", help="suppress the per-check summary on stderr")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decompose", help="Krull–Schmidt decomposition of a module file")
    d.add_argument("module_file")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--basis-changes", type=int, default=10)
    d.add_argument("--out")
    d.set_defaults(func=cmd_decompose)

    r = sub.add_parser("resolve", help="minimal projective resolution over F_p")
    r.add_argument("module_file")
    r.add_argument("--length", type=int, required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_resolve)

    c = sub.add_parser("check", help="exactness certificate for a complex file")
    c.add_argument("complex_file")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (serialize.FormatError, serialize.AuditFailure, FileNotFoundError) as e:
        return _error(str(e))


if __name__ == "__main__":
    sys.exit(main())

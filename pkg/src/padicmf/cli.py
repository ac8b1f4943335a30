"""Command line entry point: ``padicmf <subcommand> [global flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import formats
from .arith import PrimeContext, parse_character
from .companion import Check
from .errors import (
    NoStabilization,
    NotStable,
    PadicMFError,
    TruncationTooShort,
)
from .family import family_match
from .linalg import matmul
from .overconv import cache_dir, read_eigensystem, write_eigensystem
from .pipeline import (
    RunConfig,
    certify_pairs,
    find_fixture,
    report_record,
    run_many,
)
from .qseries import FormMeta, eisenstein_E, eisenstein_weight_char, theta_series
from .selfcheck import run_all
from .spaces import ingest_basis, qexpansion_to_record, write_series

log = logging.getLogger("padicmf")

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT, EXIT_PRECISION = 0, 1, 2, 3
_PRECISION_ERRORS = (NotStable, TruncationTooShort, NoStabilization)


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--prime", type=int, default=5)
    g.add_argument("--prec", type=int, default=4, help="working precision N (ring Z/p^N)")
    g.add_argument("--qprec", type=int, default=200, help="q-expansion truncation M")
    g.add_argument("--level", type=int, default=11)
    g.add_argument("--char", default="trivial",
                   help="trivial | kronecker:<D> | table:<m>:<v1,...>")
    g.add_argument("--fixtures", type=Path, default=Path("fixtures"))
    g.add_argument("--cache", type=Path, default=None)
    g.add_argument("--out", type=Path, default=None)
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--json", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-v", "--verbose", action="store_true")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="padicmf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write a q-expansion as MFQ")
    kinds = gen.add_subparsers(dest="kind", required=True)
    kinds.add_parser("eisenstein", parents=[common])
    ec = kinds.add_parser("eisenstein-char", parents=[common])
    ec.add_argument("weight", type=int)
    ec.add_argument("--psi", default="trivial")
    ec.add_argument("--phi", default="trivial")
    th = kinds.add_parser("theta", parents=[common])
    th.add_argument("a", type=int)
    th.add_argument("b", type=int)
    th.add_argument("c", type=int)
    th.add_argument("--disc", type=int, default=None)

    pl = sub.add_parser("pipeline", parents=[common],
                        help="find companion pairs and certify their weight-one combination")
    pl.add_argument("--weight", type=int, default=1)
    pl.add_argument("--from-eigensystems", nargs="+", type=Path, default=None)
    pl.add_argument("--basis", type=Path, default=None,
                    help="classical basis (MFB) for the membership test")
    pl.add_argument("--depth", type=int, default=None)

    od = sub.add_parser("ordinary", parents=[common], help="ordinary eigensystems per weight")
    od.add_argument("--weight", type=int, nargs="+", required=True)
    od.add_argument("--depth", type=int, default=None)
    od.add_argument("--all-forms", action="store_true",
                    help="build from full M_k sources instead of cusp forms")

    fm = sub.add_parser("family", parents=[common], help="match eigensystems across weights")
    fm.add_argument("--weights", type=int, nargs="+", required=True)
    fm.add_argument("--depth", type=int, default=None)
    fm.add_argument("--all-forms", action="store_true")

    st = sub.add_parser("selftest", parents=[common], help="built-in invariant suite")
    st.add_argument("--break-projection", action="store_true",
                    help="inject a faulty U_p to confirm the suite can fail")
    return parser


# --- output ------------------------------------------------------------------


def _report_json(rec: formats.ReportRecord) -> str:
    return json.dumps({
        "format": "MFR 1",
        "checks": [{"name": n, "status": "pass" if ok else "fail", "prec": prec}
                   for n, ok, prec in rec.checks],
        "data": dict(rec.data),
    }, indent=2)


def _emit_report(rec: formats.ReportRecord, args) -> None:
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        formats.write_mfr(rec, args.out / "report.mfr")
    print(_report_json(rec) if args.json else "\n".join(formats.mfr_lines(rec)))


def _config(args) -> RunConfig:
    return RunConfig(args.prime, args.prec, args.qprec, args.level, args.char,
                     args.fixtures, cache_dir(args.cache), args.out, args.threads, args.seed)


# --- subcommands -------------------------------------------------------------


def cmd_gen(args) -> int:
    ctx = PrimeContext(args.prime, args.prec, args.qprec)
    if args.kind == "eisenstein":
        f = eisenstein_E(ctx)
    elif args.kind == "eisenstein-char":
        psi = parse_character(args.psi, ctx)
        phi = parse_character(args.phi, ctx)
        f = eisenstein_weight_char(args.weight, psi, phi, ctx)
    else:
        disc = args.b * args.b - 4 * args.a * args.c
        if args.disc is not None and args.disc != disc:
            raise ValueError(f"--disc {args.disc} does not match b^2 - 4ac = {disc}")
        f = theta_series(args.a, args.b, args.c, ctx)
    if args.out is None:
        print("\n".join(formats.mfq_lines(qexpansion_to_record(f))))
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        write_series(f, args.out)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    ctx = cfg.ctx
    if args.from_eigensystems:
        systems = [read_eigensystem(path, ctx) for path in args.from_eigensystems]
        weight = systems[0].weight
    else:
        run = run_many(cfg, [args.weight], args.depth)[0]
        systems, weight = run.systems, args.weight
    basis_path = args.basis or find_fixture(cfg.fixtures, f"M{weight}_{cfg.level}_p{cfg.p}.mfb")
    basis = ingest_basis(basis_path, ctx)
    outcomes = certify_pairs(systems, basis)

    checks, data = [], [("systems", len(systems)), ("pairs", len(outcomes))]
    success = False
    for i, out in enumerate(outcomes):
        cert = out.certificate
        tag = f"pair{i}"
        for c in cert.checks:
            checks.append(Check(f"{tag}_{c.name}", c.holds, c.precision))
        checks.append(Check(f"{tag}_classical_membership", cert.membership.member,
                             cert.membership.precision))
        for c in out.relations.checks:
            if c.gating:
                checks.append(Check(f"{tag}_{c.name}", c.holds, c.precision))
            else:
                data.append((f"{tag}_{c.name}", "pass" if c.holds else "fail"))
        data += [(f"{tag}_alpha", cert.alpha), (f"{tag}_beta", cert.beta),
                 (f"{tag}_precision", cert.precision), (f"{tag}_ok", int(cert.ok))]
        good = cert.ok and out.relations.holds and cert.precision > 0
        success = success or good
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            form = cert.form.with_meta(FormMeta(cfg.level, weight, cfg.character))
            write_series(form, args.out / f"certificate{i}.mfq")
    _emit_report(report_record(checks, data), args)
    if not outcomes:
        log.warning("no companion pairs among %d eigensystems", len(systems))
    return EXIT_OK if success else EXIT_FAILED


def cmd_ordinary(args) -> int:
    cfg = _config(args)
    runs = run_many(cfg, args.weight, args.depth, cusp=not args.all_forms)
    checks, data = [], []
    mod = cfg.ctx.modulus
    for run in runs:
        k = run.weight
        e = run.projector.matrix()
        checks.append(Check(f"projector_idempotent_k{k}", matmul(e, e, mod) == e, cfg.prec))
        data += [(f"k{k}_J", run.J), (f"k{k}_katz_dim", run.katz.dim),
                 (f"k{k}_rank", run.rank),
                 (f"k{k}_stabilization_exponent", run.projector.stabilization_exponent),
                 (f"k{k}_systems", len(run.systems))]
        for i, E in enumerate(run.systems):
            data.append((f"k{k}_sys{i}_up", E.up_eigenvalue))
            if args.out is not None:
                args.out.mkdir(parents=True, exist_ok=True)
                write_eigensystem(E, args.out / f"k{k}_sys{i}.mfe")
        for i, blk in enumerate(run.extraction.skipped):
            data.append((f"k{k}_skipped{i}", f"{blk.reason}:dim{blk.dim}:up{blk.up_residue}"))
    _emit_report(report_record(checks, data), args)
    return EXIT_OK if all(c.holds for c in checks) else EXIT_FAILED


def cmd_family(args) -> int:
    if len(args.weights) < 2:
        raise ValueError("family needs at least two weights")
    cfg = _config(args)
    runs = run_many(cfg, args.weights, args.depth, cusp=not args.all_forms)
    checks, data = [], []
    for left, right in zip(runs, runs[1:]):
        tag = f"k{left.weight}_k{right.weight}"
        match = family_match(left.systems, right.systems)
        depths = [d for _, _, d in match.pairs]
        ok = match.bijective and bool(match.pairs)
        checks.append(Check(f"bijection_{tag}", ok, min(depths, default=0)))
        for j, (a, b, d) in enumerate(match.pairs):
            data += [(f"{tag}_pair{j}_depth", d), (f"{tag}_pair{j}_up_a", a.up_eigenvalue),
                     (f"{tag}_pair{j}_up_b", b.up_eigenvalue)]
        data += [(f"{tag}_unmatched_a", len(match.left_a)),
                 (f"{tag}_unmatched_b", len(match.left_b))]
    _emit_report(report_record(checks, data), args)
    return EXIT_OK if all(c.holds for c in checks) else EXIT_FAILED


def cmd_selftest(args) -> int:
    checks = run_all(args.seed, args.break_projection, threads=args.threads)
    _emit_report(report_record(checks), args)
    return EXIT_OK if all(c.holds for c in checks) else EXIT_FAILED


COMMANDS = {
    "gen": cmd_gen,
    "pipeline": cmd_pipeline,
    "ordinary": cmd_ordinary,
    "family": cmd_family,
    "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="padicmf: %(message)s")
    try:
        if args.threads < 1:
            raise ValueError("--threads must be positive")
        return COMMANDS[args.command](args)
    except _PRECISION_ERRORS as exc:
        print(f"padicmf: precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (PadicMFError, ValueError, OSError) as exc:
        print(f"padicmf: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

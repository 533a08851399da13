"""Command-line front end: ``cfplab <command> [--config PATH | --example NAME] [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus
from .config import RunConfig, load_config, parse_form
from .contraction import ZeroMode, sweep_grid
from .errors import ArgumentError, ConfigError, DomainError, InversionError, NotFound, ParseError, StructureError
from .families import check_limit_transfer, check_pointwise_convergence, solve_family
from .hypotheses import (
    auto_witnesses,
    check_compatible,
    check_compatible_type_a,
    check_reciprocal_continuity,
    check_weakly_commuting,
)
from .metric import as_rational
from .orbit import solve_common_fixed_point
from .phi import check_decay, phi_iterates, validate_phi
from .report import dumps

log = logging.getLogger("cfplab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _write(path: Path, text: str) -> None:
    """Atomic write: a temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load(args) -> RunConfig:
    if args.config and args.example:
        raise ConfigError("give either --config or --example, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.example:
        cfg = corpus.load_example(args.example).config
    else:
        raise ConfigError("a --config file or an --example name is required")
    return cfg.with_run(
        tol=args.tol,
        max_n=args.max_n,
        zero_mode=args.zero_mode,
        grid=args.grid,
        x0=" ".join(args.x0) if args.x0 else None,
    )


def _x0s(cfg: RunConfig) -> list[float]:
    xs = cfg.floats("x0")
    if not xs:
        raise ConfigError("no start point: set [run] x0 or pass --x0")
    return xs


def cmd_solve(args, cfg: RunConfig, out: Path) -> int:
    triple = cfg.triple()
    phi = cfg.phi_spec()
    ok = True
    for i, x0 in enumerate(_x0s(cfg)):
        rep = solve_common_fixed_point(triple, x0, float(cfg.get("tol")), int(cfg.get("max_n")), int(cfg.get("window")), phi)
        _write(out / f"solve_{i}.json", dumps(rep))
        _write(out / f"trace_{i}.csv", rep.trace.to_csv())
        print(f"x0={x0!r}: {rep.trace.termination.value}, candidate={rep.candidate!r}, iterations={rep.iterations}")
        ok &= rep.candidate is not None
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args, cfg: RunConfig, out: Path) -> int:
    triple = cfg.triple()
    form = parse_form(args.inequality, cfg.phi_spec()) if args.inequality else cfg.form()
    grid = triple.grid(int(cfg.get("grid")))
    rep = sweep_grid(form, triple, grid, float(cfg.get("sweep_tol")), ZeroMode(cfg.get("zero_mode")))
    _write(out / "sweep.json", dumps(rep))
    print(f"{rep.check}: {rep.verdict.value}" + (f", witness {rep.witness}" if rep.witness else ""))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_hypotheses(args, cfg: RunConfig, out: Path) -> int:
    triple = cfg.triple()
    space = triple.space
    tol = float(cfg.get("limit_tol"))
    samples = triple.grid(int(cfg.get("grid")))
    results = []
    for pair, B in (("AS", triple.S), ("AT", triple.T)):
        witnesses = cfg.witness_list() or auto_witnesses(space, triple.A, B)
        reports = [check_weakly_commuting(space, triple.A, B, samples)]
        for w in witnesses:
            reports.append(check_compatible(space, triple.A, B, w, tol))
            reports.append(check_compatible_type_a(space, triple.A, B, w, tol))
            reports.append(check_reciprocal_continuity(space, triple.A, B, w, float(w.limit), tol))
        results.append({"pair": pair, "reports": reports})
        for r in reports:
            print(f"{pair} {r.check}: {r.verdict.value}")
    _write(out / "hypotheses.json", dumps(results))
    ok = all(r.passed for res in results for r in res["reports"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_phi_check(args, cfg: RunConfig, out: Path) -> int:
    phi = cfg.phi_spec()
    if phi is None:
        raise ConfigError("phi-check needs a [phi] section")
    validation = validate_phi(phi.body, phi.validation_grid)
    tol = float(cfg.get("decay_tol", cfg.get("tol")))
    table = []
    ok = validation.passed
    for t0 in cfg.floats("t0") or [1.0]:
        rep = check_decay(phi, t0, tol)
        head = phi_iterates(phi, t0, 10).terms
        table.append({"t0": t0, "decay": rep, "first_iterates": list(head)})
        ok &= rep.passed
        print(f"t0={t0!r}: {rep.verdict.value} after {rep.details['iterations']} iterations")
    _write(out / "phi.json", dumps({"validation": validation, "decay": table}))
    print(f"phi_class: {validation.verdict.value}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_seq(args, cfg: RunConfig, out: Path) -> int:
    fam = cfg.map_family()
    tol = float(cfg.get("tol"))
    grid = fam.space.domain.components[0].sample(int(cfg.get("pointwise_points", "50")))
    pointwise = check_pointwise_convergence(fam, grid, float(cfg.get("pointwise_tol", "1e-3")), int(cfg.get("pointwise_n_max", "16")))
    probe = cfg.get("probe_x0")
    members = solve_family(
        fam,
        _x0s(cfg)[0],
        cfg.ints("n_list") or [1, 2, 4, 8, 16],
        tol,
        int(cfg.get("max_n")),
        float(as_rational(probe)) if probe else None,
    )
    u = cfg.get("u")
    transfer = check_limit_transfer(fam, [(m.n, m.u) for m in members], tol, float(as_rational(u)) if u else None)
    doc = {
        "pointwise": pointwise,
        "members": [{"n": m.n, "u": m.u, "probe_u": m.probe_u, "reason": m.report.reason} for m in members],
        "limit_transfer": transfer,
    }
    _write(out / "seq.json", dumps(doc))
    print(f"pointwise_convergence: {pointwise.verdict.value}")
    print(f"limit_transfer: {transfer.verdict.value}")
    return EXIT_OK if pointwise.passed and transfer.passed else EXIT_FAIL


def _verify_one(name: str):
    return corpus.verify_example(name)


def cmd_corpus_verify(args, out: Path) -> int:
    names = [args.example] if args.example else corpus.list_examples()
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, names))
    else:
        results = [_verify_one(n) for n in names]
    summary = {}
    for res in results:
        _write(out / f"{res.name}.json", dumps(res))
        summary[res.name] = "pass" if res.passed else "fail"
        print(f"{res.name}: {summary[res.name]}")
    _write(out / "corpus.json", dumps(summary))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "hypotheses": cmd_hypotheses,
    "phi-check": cmd_phi_check,
    "seq": cmd_seq,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--example", metavar="NAME", help="built-in example instead of a config file")
    common.add_argument("--x0", nargs="+", metavar="R", help="start point(s); rationals like 3/4 are accepted")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-n", type=int, dest="max_n")
    common.add_argument("--grid", type=int, help="uniform grid size for sweeps and samples")
    common.add_argument("--zero-mode", choices=[m.value for m in ZeroMode], dest="zero_mode")
    common.add_argument("--inequality", metavar="FORM", help='override the form, e.g. "lambda_max:lambda=0.99"')
    common.add_argument("--out", default="reports", metavar="DIR")
    common.add_argument("--jobs", type=int, default=1, metavar="N")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cfplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "corpus-verify"]:
        sub.add_parser(name, parents=[common])
    sub.add_parser("list", help="print the built-in example names")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(corpus.list_examples()))
        return EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = Path(args.out)
    try:
        if args.command == "corpus-verify":
            return cmd_corpus_verify(args, out)
        cfg = _load(args)
        return COMMANDS[args.command](args, cfg, out)
    except (ConfigError, ParseError, StructureError, ArgumentError, NotFound) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, InversionError) as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

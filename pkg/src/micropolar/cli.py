"""Command-line interface: riemann | profile | simulate | verify.

Exit codes: 0 success, 1 failed verification or run error, 2 pattern mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import artifacts
from .config import RunConfig, load_config
from .profiles import build_composite
from .riemann import ConvergenceError, PatternMismatchError, solve_pattern
from .solver import BoundaryToleranceError, PositivityError, run
from .verify import CHECKS, run_checks, verdict

log = logging.getLogger("micropolar")

OUT_ENV = "MICROPOLAR_OUT"
EXIT_OK, EXIT_FAIL, EXIT_PATTERN = 0, 1, 2


def _out_dir(args, config: RunConfig) -> Path | None:
    if args.out:
        return Path(args.out)
    if config.output.directory:
        return Path(config.output.directory)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    return None


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _pattern(config: RunConfig):
    params = config.gas.to_params()
    pat = solve_pattern(params, config.end_states.to_end_states(), tol=config.profiles.pattern_tol,
                        delta_cap=config.end_states.delta_cap)
    return params, pat


def cmd_riemann(args, config: RunConfig) -> int:
    _, pat = _pattern(config)
    summary = pat.to_dict() | {"admissible": True}
    text = json.dumps(artifacts._jsonable(summary), indent=2, sort_keys=True)
    print(text)
    out = _out_dir(args, config)
    if out is not None:
        artifacts.write_json(out / "pattern.json", summary)
    return EXIT_OK


def cmd_profile(args, config: RunConfig) -> int:
    params, pat = _pattern(config)
    comp = build_composite(params, pat, **config.bvp_options())
    field = {"composite": comp, "contact": comp.contact,
             "rarefaction_minus": comp.rar_minus, "rarefaction_plus": comp.rar_plus}[args.wave]
    x = np.linspace(args.x_min, args.x_max, args.nx)
    table = artifacts.profile_table(field, _floats(args.t), x)
    out = _out_dir(args, config)
    if out is None:
        writer_path = Path(args.csv) if args.csv else None
    else:
        writer_path = out / (args.csv or "profile.csv")
    if writer_path is None:
        print(",".join(artifacts.PROFILE_COLUMNS))
        for row in zip(*(table[c] for c in artifacts.PROFILE_COLUMNS)):
            print(",".join(repr(float(v)) for v in row))
    else:
        artifacts.write_csv(writer_path, artifacts.PROFILE_COLUMNS, table)
        print(f"wrote {writer_path}")
    return EXIT_OK


def cmd_simulate(args, config: RunConfig) -> int:
    out = _out_dir(args, config) or Path("micropolar-out")
    sink = artifacts.snapshot_writer(out) if config.output.snapshots and "csv" in config.output.formats else None

    def progress(rep):
        log.info("t=%.4g  sup=%.4e  L2=%.4e  omega L2=%.4e", rep.t, rep.linf, rep.l2, rep.omega_l2)

    try:
        res = run(config, snapshot_sink=sink, progress=progress)
    except (PositivityError, BoundaryToleranceError) as exc:
        log.error("run aborted: %s", exc)
        if isinstance(exc, PositivityError) and exc.snapshot is not None:
            s = exc.snapshot
            artifacts.write_csv(out / "abort_snapshot.csv", ("x", "v", "u", "theta", "omega"),
                                {"x": s.x, "v": s.v, "u": s.u, "theta": s.theta, "omega": s.omega})
        return EXIT_FAIL
    if "csv" in config.output.formats:
        artifacts.write_norms(out / "norms.csv", res.reports)
    if "json" in config.output.formats:
        artifacts.write_json(out / "summary.json", res.summary)
    artifacts.write_metadata(out, "simulate")
    s = res.summary
    print(f"steps {s['steps']}, sup ratio {s['sup_ratio']}, v in [{s['bounds']['v_min']:.6g}, {s['bounds']['v_max']:.6g}], "
          f"theta in [{s['bounds']['theta_min']:.6g}, {s['bounds']['theta_max']:.6g}]")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_verify(args, config: RunConfig) -> int:
    names = [n.strip() for n in args.checks.split(",")] if args.checks else None
    results = run_checks(config, names, report=lambda r: print(r.line(), flush=True))
    report = verdict(results)
    out = _out_dir(args, config)
    if out is not None:
        artifacts.write_json(out / "verdict.json", report)
        artifacts.write_metadata(out, "verify")
    print("ALL CHECKS PASSED" if report["passed"] else "SOME CHECKS FAILED")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--out", help=f"output directory (default: config output.directory, then ${OUT_ENV})")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. grid.n=2048 (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="micropolar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("riemann", parents=[common], help="solve for the middle states of the wave pattern")
    p = sub.add_parser("profile", parents=[common], help="dump a wave profile as CSV")
    p.add_argument("action", nargs="?", choices=["dump"], default="dump")
    p.add_argument("--t", default="0", help="comma-separated times")
    p.add_argument("--x-min", type=float, default=-20.0)
    p.add_argument("--x-max", type=float, default=20.0)
    p.add_argument("--nx", type=int, default=401)
    p.add_argument("--wave", choices=["composite", "contact", "rarefaction_minus", "rarefaction_plus"], default="composite")
    p.add_argument("--csv", help="CSV file name (relative to the output directory if one is set)")
    sub.add_parser("simulate", parents=[common], help="evolve perturbed composite-wave data")
    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    return parser


COMMANDS = {"riemann": cmd_riemann, "profile": cmd_profile, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config, args.override)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        return COMMANDS[args.command](args, config)
    except PatternMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PATTERN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

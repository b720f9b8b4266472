"""Command-line entry point: ``pointer-ideality <subcommand> [options]``.

Exit codes: 0 success, 1 failed paper-check, 2 syntax error, 3 validation
error, 4 every sweep point failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import checks
from .grid import Grid, GridError, Wavefunction
from .measures import ideality_report
from .measurement import QubitState
from .sweep import (
    ConfigSyntaxError,
    ConfigValidationError,
    GridSettings,
    SweepSpec,
    emit,
    parse_config,
    run_sweep,
    with_overrides,
)

log = logging.getLogger("pointer_ideality")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_SYNTAX, EXIT_VALIDATION, EXIT_ALL_FAILED = 0, 1, 2, 3, 4


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--paper-literal", action="store_true", default=None,
                        help="append closed forms exactly as printed (t^4 spread, squeezed |I|)")
    common.add_argument("--strict-window", action="store_true", default=None,
                        help="fail points whose window truncates instead of flagging them")
    return common


def _grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x-min", type=float)
    parser.add_argument("--x-max", type=float)
    parser.add_argument("--n", type=int, help="odd node count")
    parser.add_argument("--alpha", type=complex, default=None, help="qubit amplitude on |up>_x")
    parser.add_argument("--beta", type=complex, default=None, help="qubit amplitude on |down>_x")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="pointer-ideality",
        description="Formal vs operational idealness of von Neumann pointer states.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gaussian", parents=[common], help="one Gaussian pointer configuration")
    p.add_argument("--sigma0", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    _grid_options(p)

    p = sub.add_parser("squeezed", parents=[common], help="one squeezed pointer configuration")
    p.add_argument("--sigma0", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    _grid_options(p)

    p = sub.add_parser("faithful", parents=[common], help="one faithful pointer configuration")
    p.add_argument("--sigma0", type=float, default=1.0, help="envelope density width")
    p.add_argument("--envelope", choices=("gaussian", "triangular"), default="gaussian")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    tilt = p.add_mutually_exclusive_group()
    tilt.add_argument("--tilt", type=float, help="u' = Re acosh(-1/(gamma1 + gamma2))")
    tilt.add_argument("--gamma1", type=complex)
    p.add_argument("--m", type=int, default=0)
    _grid_options(p)

    p = sub.add_parser("certify", parents=[common],
                       help="faithfulness certificate for sampled wavefunctions")
    p.add_argument("input", type=Path,
                   help="CSV with columns x,psi_plus_re,psi_plus_im,psi_minus_re,psi_minus_im")
    p.add_argument("--mass-floor", type=float, default=1e-6)

    p = sub.add_parser("sweep", parents=[common], help="config-driven parameter sweep")
    p.add_argument("--config", type=Path, required=True)

    sub.add_parser("paper-check", help="run the reproduction checks and report pass/fail")
    return parser


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def _single_point_spec(args) -> SweepSpec:
    if args.command == "faithful":
        params = {"sigma0": (args.sigma0,), "theta": (args.theta,), "s": (args.s,), "m": (float(args.m),)}
        if args.gamma1 is not None:
            params["gamma1_re"] = (args.gamma1.real,)
            params["gamma1_im"] = (args.gamma1.imag,)
        else:
            params["tilt"] = (args.tilt or 0.0,)
        extra = {"envelope": args.envelope}
    else:
        params = {"sigma0": (args.sigma0,), "g": (args.g,), "t": (args.t,)}
        if args.command == "squeezed":
            params["C"] = (args.C,)
        extra = {}
    spec = SweepSpec(family=args.command, params=params, **extra)
    given = [v for v in (args.x_min, args.x_max, args.n) if v is not None]
    if given:
        if len(given) != 3:
            raise ConfigValidationError("grid", "--x-min, --x-max and --n go together")
        settings = GridSettings(args.x_min, args.x_max, args.n, auto=False)
        try:
            settings.grid
        except GridError as exc:
            raise ConfigValidationError("grid.n", str(exc)) from None
        spec = with_overrides(spec, grid=settings)
    if args.alpha is not None or args.beta is not None:
        alpha = args.alpha if args.alpha is not None else 0j
        beta = args.beta if args.beta is not None else 0j
        norm = math.hypot(abs(alpha), abs(beta))
        if norm == 0:
            raise ConfigValidationError("qubit", "amplitudes are all zero")
        spec = with_overrides(spec, qubit=QubitState(alpha / norm, beta / norm))
    return spec


def _run_spec(spec: SweepSpec, args) -> int:
    spec = with_overrides(
        spec,
        output_format=args.format,
        workers=args.workers,
        seed=args.seed,
        paper_literal=args.paper_literal,
        strict_window=args.strict_window,
    )
    records = run_sweep(spec)
    for rec in records:
        if rec.failed:
            log.warning("point %d failed: %s", rec.index, rec.error)
    _write(emit(records, spec.output_format, paper_literal=spec.paper_literal), args.out)
    return EXIT_ALL_FAILED if all(r.failed for r in records) else EXIT_OK


def _load_sampled_pair(path: Path) -> tuple[Wavefunction, Wavefunction]:
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            cols = ("x", "psi_plus_re", "psi_plus_im", "psi_minus_re", "psi_minus_im")
            if reader.fieldnames is None or any(c not in reader.fieldnames for c in cols):
                raise ConfigSyntaxError(f"{path}: expected columns {','.join(cols)}")
            data = np.array([[float(row[c]) for c in cols] for row in reader])
    except (OSError, ValueError) as exc:
        if isinstance(exc, ConfigSyntaxError):
            raise
        raise ConfigSyntaxError(f"{path}: {exc}") from exc
    if data.ndim != 2 or len(data) < 3:
        raise ConfigValidationError("input", "need at least three sample rows")
    x = data[:, 0]
    try:
        grid = Grid(float(x[0]), float(x[-1]), len(x))
    except GridError as exc:
        raise ConfigValidationError("input", str(exc)) from None
    if np.max(np.abs(x - grid.x)) > 1e-9 * max(grid.h, 1.0):
        raise ConfigValidationError("input", "x samples are not uniformly spaced")
    plus = Wavefunction(grid, data[:, 1] + 1j * data[:, 2])
    minus = Wavefunction(grid, data[:, 3] + 1j * data[:, 4])
    return plus, minus


def _certify(args) -> int:
    plus, minus = _load_sampled_pair(args.input)
    report = ideality_report(plus, minus, mass_floor=args.mass_floor)
    fields = {
        "is_faithful": report.is_faithful,
        "phase_dev": report.phase_dev,
        "M": report.M,
        "absI": report.absI,
        "gap": report.gap,
        "E": report.E,
        "truncation": report.truncation,
    }
    if (args.format or "json") == "json":
        clean = {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in fields.items()}
        _write((json.dumps(clean, indent=1) + "\n").encode(), args.out)
    else:
        header = ",".join(fields)
        row = ",".join(str(v).lower() if isinstance(v, bool) else f"{v:.12g}" for v in fields.values())
        _write(f"{header}\n{row}\n".encode(), args.out)
    return EXIT_OK


def _paper_check() -> int:
    results = checks.run_all()
    for res in results:
        print(res.line())
        for line in res.details:
            print(f"    {line}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "paper-check":
            return _paper_check()
        if args.command == "certify":
            return _certify(args)
        if args.command == "sweep":
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise ConfigSyntaxError(str(exc)) from exc
            return _run_spec(parse_config(text), args)
        return _run_spec(_single_point_spec(args), args)
    except ConfigSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except ConfigValidationError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

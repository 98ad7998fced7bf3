"""Command-line front end.

Usage:
    dmtlab point --case csir-hat-tc-hat --m 2 --n 2 --r 1
    dmtlab curve --case csir-tq-hat --k 3 --m 2 --n 2 --dense
    dmtlab table --m 2 --n 2 --k 2 --r 0.5
    dmtlab figure1 --out figure1.csv
    dmtlab simulate --protocol perfect-quantized --k 2 --m 1 --n 1 --r 0.2 \\
        --snr-db 10:30:5 --trials 10000000 --seed 1 --out sweep.csv
    dmtlab fit sweep.csv

Exit codes: 0 success, 1 usage error, 2 domain error, 3 unbounded case,
4 file I/O error, 5 too few usable points for a slope fit, 6 unparsable input.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curves import curve, sample_grid
from .dmt import (
    CHARACTERISTICS,
    AntennaConfig,
    CaseKind,
    FeedbackCase,
    OverheadConfig,
    all_cases,
    d_case,
    effective_multiplexing,
)
from .errors import DomainError, InsufficientDataError, UnsupportedCaseError
from .io import (
    CURVE_COLUMNS,
    FIT_ROW,
    REFERENCE_ROW,
    SIMULATE_COLUMNS,
    TABLE_COLUMNS,
    read_csv_rows,
    render_csv,
    render_json,
)
from .sim.engine import OutageEstimate, estimate_outage, resolve_workers
from .sim.fit import fit_diversity
from .sim.protocols import Protocol, ProtocolKind, TrialConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_UNBOUNDED = 3
EXIT_IO = 4
EXIT_FIT = 5
EXIT_PARSE = 6

DENSE_SAMPLES = 201

FIGURE1_CASES = (
    CaseKind.CSIR,
    CaseKind.CSIR_HAT,
    CaseKind.CSIR_TQ,
    CaseKind.CSIR_HAT_TQ,
    CaseKind.CSIR_TQ_HAT,
    CaseKind.CSIR_HAT_TQ_HAT,
    CaseKind.CSIR_HAT_TC_HAT,
)

# Analytic counterpart of each simulated protocol.
PROTOCOL_CASE = {
    ProtocolKind.NO_FEEDBACK_CSIR: CaseKind.CSIR,
    ProtocolKind.PERFECT_QUANTIZED: CaseKind.CSIR_TQ,
    ProtocolKind.NOISY_QUANTIZED_FDD: CaseKind.CSIR_TQ_HAT,
    ProtocolKind.TDD_NOISY_TRAINING: CaseKind.CSIR_TC_HAT,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _case_name(text: str) -> str:
    try:
        CaseKind(text)
    except ValueError:
        known = ", ".join(k.value for k in CaseKind)
        raise argparse.ArgumentTypeError(f"unknown case {text!r} (choose from {known})") from None
    return text


def _snr_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:step in dB")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric SNR range {text!r}") from None


def _overhead(text: str) -> OverheadConfig:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected L:TAU")
    try:
        return OverheadConfig(int(parts[0]), int(parts[1]))
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def sweep_points(start: float, stop: float, step: float) -> list[float]:
    if not start < stop:
        raise DomainError(f"SNR sweep needs start < stop, got {start}:{stop}")
    if not step > 0:
        raise DomainError(f"SNR sweep needs a positive step, got {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 3:
        raise DomainError(f"SNR sweep {start}:{stop}:{step} has {count} points; need at least 3")
    return [start + i * step for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dmtlab", description="Diversity-multiplexing tradeoffs with feedback.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file supplying default flag values")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, k_default=2):
        p.add_argument("--m", type=int, default=2, help="transmit antennas")
        p.add_argument("--n", type=int, default=2, help="receive antennas")
        p.add_argument("--k", type=int, default=k_default, help="feedback levels K")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("point", help="diversity order of one case at one r")
    common(p)
    p.add_argument("--case", type=_case_name, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--overhead", type=_overhead, metavar="L:TAU",
                   help="scale r by L/(L-TAU) for training overhead")

    p = sub.add_parser("curve", help="exact breakpoints of one case's tradeoff curve")
    common(p)
    p.add_argument("--case", type=_case_name, required=True)
    p.add_argument("--r-max", type=float, help="truncate the curve at this multiplexing gain")
    p.add_argument("--dense", action="store_true", help=f"add {DENSE_SAMPLES} evenly spaced samples")

    p = sub.add_parser("table", help="all ten cases at one (r, K)")
    common(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--overhead", type=_overhead, metavar="L:TAU")

    p = sub.add_parser("figure1", help="the seven finite curves plus a manifest")
    common(p)
    p.add_argument("--dense", action="store_true")
    p.set_defaults(out="figure1.csv")

    p = sub.add_parser("simulate", help="Monte Carlo outage sweep with slope fit")
    common(p)
    p.add_argument("--protocol", choices=[k.value for k in ProtocolKind], required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--snr-db", type=_snr_range, default=(10.0, 30.0, 5.0), metavar="START:STOP:STEP")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, help="parallel worker processes (env DMTLAB_WORKERS)")

    p = sub.add_parser("fit", help="refit the slope of a simulate CSV")
    p.add_argument("path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    return parser


def _load_config(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {known.config}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {known.config} is not valid JSON: {exc}", EXIT_PARSE) from exc
    if not isinstance(data, dict):
        raise CliError(f"config {known.config} must hold a JSON object", EXIT_PARSE)
    return {key.replace("-", "_"): value for key, value in data.items()}


def _meta(command: str, **extra) -> dict:
    meta = {"tool": "dmtlab", "version": __version__, "command": command}
    meta.update(extra)
    meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return meta


def _emit(args, text: str) -> None:
    if args.out:
        try:
            Path(args.out).write_text(text, newline="")
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from exc
    else:
        sys.stdout.write(text)


def cmd_point(args) -> None:
    cfg = AntennaConfig(args.m, args.n)
    case = FeedbackCase.parse(args.case, args.k)
    r = effective_multiplexing(args.r, args.overhead, cfg) if args.overhead else args.r
    row = {"case": case.name, "m": cfg.m, "n": cfg.n, "k": case.K, "r": r, "d": d_case(case, r, cfg)}
    if args.format == "json":
        _emit(args, render_json({"meta": _meta("point"), "rows": [row]}))
    else:
        _emit(args, render_csv(CURVE_COLUMNS, [row]))


def curve_rows(case: FeedbackCase, cfg: AntennaConfig, dense: bool = False, r_max: float | None = None):
    pl = curve(case, cfg)
    rs = list(pl.r)
    if dense:
        rs = sorted(set(rs) | set(sample_grid(cfg, DENSE_SAMPLES).tolist()))
    if r_max is not None:
        if not 0.0 < r_max <= cfg.min_mn:
            raise DomainError(f"--r-max must lie in (0, {cfg.min_mn}], got {r_max}")
        rs = [x for x in rs if x < r_max] + [r_max]
    return [
        {"case": case.name, "m": cfg.m, "n": cfg.n, "k": case.K, "r": float(x), "d": float(pl(x))}
        for x in rs
    ]


def cmd_curve(args) -> None:
    cfg = AntennaConfig(args.m, args.n)
    case = FeedbackCase.parse(args.case, args.k)
    rows = curve_rows(case, cfg, dense=args.dense, r_max=args.r_max)
    if args.format == "json":
        _emit(args, render_json({"meta": _meta("curve"), "rows": rows}))
    else:
        _emit(args, render_csv(CURVE_COLUMNS, rows))


def table_rows(cfg: AntennaConfig, K: int, r: float) -> list[dict]:
    rows = []
    for case in all_cases(K):
        rows.append({
            "case": case.name,
            "duplex": case.kind.duplex,
            "characteristic": CHARACTERISTICS[case.kind],
            "m": cfg.m,
            "n": cfg.n,
            "k": case.K,
            "r": r,
            "d": d_case(case, r, cfg),
        })
    return rows


def cmd_table(args) -> None:
    cfg = AntennaConfig(args.m, args.n)
    if args.k < 2:
        raise DomainError(f"table needs K >= 2 for the feedback cases, got K={args.k}")
    r = effective_multiplexing(args.r, args.overhead, cfg) if args.overhead else args.r
    rows = table_rows(cfg, args.k, r)
    if args.format == "json":
        _emit(args, render_json({"meta": _meta("table"), "rows": rows}))
    else:
        _emit(args, render_csv(TABLE_COLUMNS, rows))


def figure1_data(cfg: AntennaConfig, K: int, dense: bool = False):
    """Rows for the seven bounded curves and the list of unbounded cases."""
    groups = []
    for kind in FIGURE1_CASES:
        case = FeedbackCase(kind, K if kind.min_k is not None else None)
        groups.append((case, curve_rows(case, cfg, dense=dense)))
    unbounded = [case for case in all_cases(K) if not case.bounded]
    return groups, unbounded


def cmd_figure1(args) -> None:
    cfg = AntennaConfig(args.m, args.n)
    if args.k < 2:
        raise DomainError(f"figure1 needs K >= 2, got K={args.k}")
    groups, unbounded = figure1_data(cfg, args.k, dense=args.dense)
    rows = [row for _, group in groups for row in group]
    out = Path(args.out)
    manifest = {
        "schema": "dmtlab.figure1/1",
        "m": cfg.m,
        "n": cfg.n,
        "k": args.k,
        "csv": out.name,
        "columns": list(CURVE_COLUMNS),
        "curves": [
            {"case": c.name, "k": c.K, "characteristic": CHARACTERISTICS[c.kind], "rows": len(g)}
            for c, g in groups
        ],
        "unbounded": [
            {"case": c.name, "characteristic": CHARACTERISTICS[c.kind], "d": "inf"} for c in unbounded
        ],
    }
    manifest_path = out.with_suffix(".manifest.json")
    if args.format == "json":
        body = render_json({"meta": _meta("figure1"), "rows": rows})
    else:
        body = render_csv(CURVE_COLUMNS, rows)
    try:
        out.write_text(body, newline="")
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write figure data: {exc}", EXIT_IO) from exc
    print(f"wrote {out} ({len(groups)} curves) and {manifest_path}", file=sys.stderr)


def _point_row(protocol: Protocol, cfg, r, snr_db, est: OutageEstimate) -> dict:
    return {
        "protocol": protocol.name, "m": cfg.m, "n": cfg.n, "k": protocol.K, "r": r,
        "snr_db": snr_db, "trials": est.trials, "outages": est.outage_count,
        "p_out": est.outage_probability, "ci_low": est.ci_low, "ci_high": est.ci_high,
        "mean_power_ratio": est.mean_power_ratio,
    }


def _summary_row(protocol_name, m, n, k, r, marker, value, lo=None, hi=None, npoints=None) -> dict:
    return {
        "protocol": protocol_name, "m": m, "n": n, "k": k, "r": r, "snr_db": marker,
        "trials": npoints, "outages": None, "p_out": value, "ci_low": lo, "ci_high": hi,
        "mean_power_ratio": None,
    }


def cmd_simulate(args) -> None:
    cfg = AntennaConfig(args.m, args.n)
    protocol = Protocol.parse(args.protocol, args.k)
    snrs = sweep_points(*args.snr_db)
    workers = args.workers if args.workers is not None else args.config_workers
    workers = resolve_workers(workers)

    points = []
    for snr_db in snrs:
        tc = TrialConfig(cfg, args.r, snr_db, protocol, args.trials, args.seed)
        points.append((snr_db, estimate_outage(tc, workers=workers)))
    rows = [_point_row(protocol, cfg, args.r, db, est) for db, est in points]
    reference_case = FeedbackCase(PROTOCOL_CASE[protocol.kind],
                                  protocol.K if PROTOCOL_CASE[protocol.kind].min_k else None)
    reference = d_case(reference_case, args.r, cfg)

    fit = None
    fit_error = None
    try:
        fit = fit_diversity(points)
    except InsufficientDataError as exc:
        fit_error = exc
    if fit is not None:
        lo, hi = fit.interval()
        rows.append(_summary_row(protocol.name, cfg.m, cfg.n, protocol.K, args.r, FIT_ROW,
                                 fit.diversity_estimate, lo, hi, len(fit.points)))
        rows.append(_summary_row(protocol.name, cfg.m, cfg.n, protocol.K, args.r, REFERENCE_ROW, reference))

    if args.format == "json":
        doc = {
            "meta": _meta("simulate", seed=args.seed),
            "rows": rows[: len(points)],
            "fit": None if fit is None else {
                "diversity_estimate": fit.diversity_estimate,
                "stderr": fit.stderr,
                "points_used": len(fit.points),
            },
            "reference": {"case": reference_case.name, "d": reference},
        }
        _emit(args, render_json(doc))
    else:
        _emit(args, render_csv(SIMULATE_COLUMNS, rows))
    if fit_error is not None:
        raise CliError(str(fit_error), EXIT_FIT)


def fit_from_rows(rows: list[dict]):
    points = []
    for i, row in enumerate(rows, start=2):
        marker = row["snr_db"].strip()
        if marker in (FIT_ROW, REFERENCE_ROW):
            continue
        try:
            snr_db = float(marker)
            trials = int(row["trials"])
            outages = int(row["outages"])
        except ValueError as exc:
            raise CliError(f"line {i}: {exc}", EXIT_PARSE) from exc
        if trials < 1 or not 0 <= outages <= trials:
            raise CliError(f"line {i}: need 0 <= outages <= trials and trials >= 1", EXIT_PARSE)
        p = outages / trials
        points.append((snr_db, OutageEstimate(p, p, p, trials, outages, float("nan"))))
    return fit_diversity(points)


def cmd_fit(args) -> None:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {args.path}: {exc}", EXIT_IO) from exc
    try:
        rows = read_csv_rows(text, ("snr_db", "trials", "outages"))
    except (ValueError, csv.Error) as exc:
        raise CliError(f"cannot parse {args.path}: {exc}", EXIT_PARSE) from exc
    fit = fit_from_rows(rows)
    first = rows[0] if rows else {}
    record = {
        "protocol": first.get("protocol", ""),
        "m": first.get("m", ""),
        "n": first.get("n", ""),
        "k": first.get("k", ""),
        "r": first.get("r", ""),
        "points": len(fit.points),
        "diversity": fit.diversity_estimate,
        "stderr": fit.stderr,
    }
    if args.format == "json":
        _emit(args, render_json({"meta": _meta("fit"), "rows": [record]}))
    else:
        _emit(args, render_csv(tuple(record), [record]))


COMMANDS = {
    "point": cmd_point,
    "curve": cmd_curve,
    "table": cmd_table,
    "figure1": cmd_figure1,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config = _load_config(argv)
    except CliError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return exc.code
    config_workers = config.pop("workers", None)
    if config:
        for action in parser._subparsers._group_actions:
            for sub in action.choices.values():
                sub.set_defaults(**{k: v for k, v in config.items() if k != "config"})
                for opt in sub._actions:
                    if opt.dest in config:
                        opt.required = False
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.config_workers = config_workers
    if args.command == "simulate" and args.workers is None and "DMTLAB_WORKERS" in os.environ:
        args.workers = int(os.environ["DMTLAB_WORKERS"])

    try:
        COMMANDS[args.command](args)
    except CliError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return exc.code
    except UnsupportedCaseError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except InsufficientDataError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except DomainError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dmtlab: error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""``precode-lab`` command line: ``simulate`` and ``complexity``.

Exit codes: 0 success, 2 configuration error, 3 infeasible inner precoder.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .complexity import SCHEMES as COST_SCHEMES
from .complexity import CostQuery, check_table1_consistency, flops
from .config import (
    ConfigKeyError,
    SystemConfig,
    config_from_mapping,
    dump_config,
    load_config,
    parse_config_text,
    parse_grid,
)
from .errors import DegenerateRunError, FeasibilityError, ParameterError
from .sim import sweep

log = logging.getLogger("precode_lab")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 2, 3

BER_COLUMNS = ("scheme", "ebn0_db", "bits", "errors", "ber", "blocks_used", "degenerate_blocks")
FLOP_COLUMNS = ("scheme", "K", "N", "G", "T", "flops", "table1_residual")


def fmt(value) -> str:
    """CSV number formatting: integers verbatim, reals at 12 significant digits."""
    if isinstance(value, bool) or isinstance(value, str):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def manifest_lines(command: str, settings: list[tuple[str, str]], timestamp: str | None) -> list[str]:
    lines = [f"# precode-lab {__version__} {command}"]
    if timestamp:
        lines.append(f"# timestamp = {timestamp}")
    lines += [f"# {k} = {v}" for k, v in settings]
    return lines


def write_csv(path: Path, header_lines, columns, rows) -> None:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _out_dir(arg: str | None) -> Path:
    return Path(arg or os.environ.get("PRECODE_LAB_OUT") or ".")


def _timestamp(args) -> str | None:
    if args.no_timestamp:
        return None
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def cmd_simulate(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.schemes:
        overrides["schemes"] = args.schemes
    if args.ebn0:
        overrides["ebn0_grid_db"] = args.ebn0
    try:
        if args.config:
            cfg = load_config(args.config, overrides)
        else:
            cfg = config_from_mapping(overrides)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        records = sweep(cfg, workers=args.workers)
    except FeasibilityError as exc:
        print(f"error: infeasible inner precoder: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DegenerateRunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = _out_dir(args.out) / "ber.csv"
    rows = [
        (r.scheme, r.ebn0_db, r.bits, r.errors, r.ber, r.blocks_used, r.degenerate_blocks)
        for r in records
    ]
    write_csv(out, manifest_lines("simulate", cfg.to_items(), _timestamp(args)), BER_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_complexity(args) -> int:
    try:
        ks = [int(round(k)) for k in parse_grid(args.K)]
    except ParameterError as exc:
        print(f"error: --K: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    for K in ks:
        if K < 1 or K % args.G:
            log.warning("skipping K=%d: G=%d does not divide it", K, args.G)
            continue
        residual = check_table1_consistency(K, args.N, args.G, args.T)
        for scheme in COST_SCHEMES:
            q = CostQuery(scheme, K=K, N=args.N, T=args.T, G=args.G)
            rows.append((scheme, K, args.N, args.G, args.T, flops(q).flops, residual))
    if not rows:
        print("error: no valid K in range", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args.out) / "flops.csv"
    settings = [("K", args.K), ("N", str(args.N)), ("G", str(args.G)), ("T", str(args.T))]
    write_csv(out, manifest_lines("complexity", settings, _timestamp(args)), FLOP_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="precode-lab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo BER sweep")
    sim.add_argument("--config", help="key = value scenario file")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--schemes", help="comma list of rzf,pgp-rzf,thp,hl-thp")
    sim.add_argument("--ebn0", help="Eb/N0 grid in dB, start:step:stop")
    sim.add_argument("--out", help="output directory (default $PRECODE_LAB_OUT or .)")
    sim.add_argument("--no-timestamp", action="store_true", help="omit the timestamp comment")
    sim.set_defaults(func=cmd_simulate)

    cx = sub.add_parser("complexity", help="closed-form FLOP counts")
    cx.add_argument("--K", required=True, help="user counts, start:step:stop or list")
    cx.add_argument("--N", type=int, required=True)
    cx.add_argument("--G", type=int, required=True)
    cx.add_argument("--T", type=int, required=True)
    cx.add_argument("--out")
    cx.add_argument("--no-timestamp", action="store_true")
    cx.set_defaults(func=cmd_complexity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

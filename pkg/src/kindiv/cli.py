"""Command-line front end: exact counts, Q tables, orderings and verification suites.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capacity or
precision limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from pathlib import Path

import mpmath

from . import asymptotics, bias, exact_count, verify
from .errors import CapacityError, DomainError, GuardError, KindivError, PrecisionError, UnresolvedComparisonError
from .interval import DEFAULT_PREC, MAX_PREC
from .special_functions import digamma

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
MIN_PREC = 64
PREC_ENV = "KINDIV_PREC"
CACHE_ENV = "KINDIV_CACHE_DIR"
_CACHE_NAME = re.compile(r"pkx_k(\d+)_n(\d+)\.bin$")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    precision_bits: int = DEFAULT_PREC
    n_cap: int = exact_count.DEFAULT_N_CAP
    threads: int = 1
    output_format: str = "csv"
    cache_dir: Path | None = None


# -- table cache -------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "kindiv"


def cached_table(k: int, n_max: int, cfg: CliConfig, method: str = "dp") -> exact_count.PartitionTable:
    """Smallest cached table for k covering n_max, else build one and store it."""
    if n_max > cfg.n_cap:
        raise CapacityError(f"n={n_max} exceeds --n-cap {cfg.n_cap}")
    cache = cfg.cache_dir
    if cache is not None and cache.is_dir():
        best = None
        for path in cache.iterdir():
            m = _CACHE_NAME.match(path.name)
            if m and int(m.group(1)) == k and int(m.group(2)) >= n_max:
                if best is None or int(m.group(2)) < best[0]:
                    best = (int(m.group(2)), path)
        if best is not None:
            try:
                table = exact_count.load_table_file(best[1])
            except (ValueError, OSError):
                table = None
            if table is not None and table.k == k and table.n_max >= n_max:
                return table
    table = verify.build_table(k, n_max, method, cfg.n_cap)
    if cache is not None:
        exact_count.save_table_file(table, cache / f"pkx_k{k}_n{n_max}.bin")
    return table


# -- formatting ------------------------------------------------------------


def _decimal(value: Fraction) -> Decimal:
    ctx = Context(prec=60, rounding=ROUND_HALF_EVEN)
    return ctx.divide(Decimal(value.numerator), Decimal(value.denominator))


def fmt_fixed(value: Fraction, places: int) -> str:
    return str(verify.round_half_even(value, places))


def fmt_sig(value: Fraction, digits: int) -> str:
    """Round-half-even to a fixed number of significant digits, keeping trailing zeros."""
    if value == 0:
        return "0." + "0" * (digits - 1)
    d = Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(_decimal(value))
    d = d.quantize(Decimal(1).scaleb(d.adjusted() - digits + 1), rounding=ROUND_HALF_EVEN)
    if -6 <= d.adjusted() < 15:
        return f"{d:f}"
    return f"{d:E}"


def emit_rows(header, rows, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        out.write(buf.getvalue())
    else:
        cols = [header] + [[str(c) for c in r] for r in rows]
        widths = [max(len(str(row[i])) for row in cols) for i in range(len(header))]
        for row in cols:
            out.write("  ".join(str(c).rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")


def _seq(seq) -> str:
    return " ".join(map(str, seq))


# -- subcommands -------------------------------------------------------------


def cmd_exact(args, cfg, out):
    q = exact_count.ExactQuery(args.k, args.t, args.r, args.n)
    value = exact_count.d_exact(q, cached_table(args.k, args.n, cfg))
    if cfg.output_format == "json":
        out.write(json.dumps({"k": args.k, "t": args.t, "r": args.r, "n": args.n, "value": str(value)}) + "\n")
    else:
        out.write(f"{value}\n")
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc
    if not values:
        raise UsageError("empty list")
    return values


def cmd_qtable(args, cfg, out):
    key = bias.BiasKey(args.k, args.t)
    ns = _parse_int_list(args.n_list)
    if min(ns) < 1:
        raise UsageError("n values must be >= 1")
    table = cached_table(args.k, max(ns), cfg, args.method)
    rows = []
    for n in ns:
        exact = exact_count.d_exact(exact_count.ExactQuery(args.k, args.t, args.r, n), table)
        est = asymptotics.d_hat(key, args.r, n, cfg.precision_bits).value
        q = exact / est.mid_fraction()
        rows.append([n, exact, fmt_sig(est.mid_fraction(), 12), fmt_fixed(q, 5)])
    emit_rows(["n", "exact", "estimate", "Q"], rows, cfg.output_format, out)
    return EXIT_OK


def _require_certified(o: bias.Ordering):
    if not o.certified:
        raise UnresolvedComparisonError([(o.key.k, r, s) for r, s in o.unresolved_pairs])


def cmd_ordering(args, cfg, out):
    o = bias.ordering(bias.BiasKey(args.k, args.t), cfg.precision_bits)
    _require_certified(o)
    if cfg.output_format == "json":
        out.write(json.dumps({"k": args.k, "t": args.t, "ordering": list(o.sequence), "prec": o.prec}) + "\n")
    else:
        out.write(_seq(o.sequence) + "\n")
    return EXIT_OK


def cmd_orderings(args, cfg, out):
    atlas = bias.order_count(args.t, args.k_max, cfg.precision_bits, workers=cfg.threads)
    tail = f">{atlas.k_max_searched}"
    rows = []
    for seq, ks in atlas.entries.items():
        label = " ".join(map(str, ks))
        if seq == tuple(range(1, args.t + 1)):
            label = (label + " " if label else "") + tail
        rows.append([_seq(seq), label])
    if cfg.output_format == "plain":
        width = max(len(r[0]) for r in rows)
        for seq, label in rows:
            out.write(f"{seq.ljust(width)}  | k = {label}\n")
    else:
        emit_rows(["ordering", "k"], rows, cfg.output_format, out)
    return EXIT_OK


def _scan_one(t, prec):
    atlas = bias.order_count(t, prec=prec)
    return t, atlas.count


def cmd_ocount(args, cfg, out):
    if args.t_min < 2 or args.t_max < args.t_min:
        raise UsageError("need 2 <= t-min <= t-max")
    ts = list(range(args.t_min, args.t_max + 1))
    if cfg.threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            counts = dict(pool.map(_scan_one, ts, [cfg.precision_bits] * len(ts)))
    else:
        counts = dict(_scan_one(t, cfg.precision_bits) for t in ts)
    rows = []
    for t in ts:
        phi = bias.euler_phi(t)
        rows.append([t, counts[t], phi, fmt_sig(Fraction(counts[t], phi), 6)])
    emit_rows(["t", "O_t", "phi_t", "ratio"], rows, cfg.output_format, out)
    return EXIT_OK


def _coerce(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_verify(args, cfg, out):
    manifest = verify.load_manifest(args.manifest) if args.manifest else None
    base = (manifest or verify.DEFAULT_MANIFEST)[args.suite]
    params = {}
    if "prec" in base:
        params["prec"] = cfg.precision_bits
    if "workers" in base:
        params["workers"] = cfg.threads
    if args.t is not None:
        params["t"] = args.t
    if args.item is not None:
        params["item"] = args.item
    if args.t_min is not None or args.t_max is not None:
        if args.suite == "theorem-1.5":
            lo = args.t_min if args.t_min is not None else base["item5_t_min"]
            hi = args.t_max if args.t_max is not None else base["item5_t_max"]
            params["t_range"] = f"{lo}..{hi}"
        else:
            if args.t_min is not None:
                params["t_min"] = args.t_min
            if args.t_max is not None:
                params["t_max"] = args.t_max
    if args.full:
        params["full"] = True
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        name, value = item.split("=", 1)
        params[name.strip()] = _coerce(value)
    report = verify.run_suite(args.suite, params, manifest)
    out.write(report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_digamma(args, cfg, out):
    value = digamma(Fraction(args.x), cfg.precision_bits)
    lo, hi = value.lo, value.hi
    digits = max(15, int(cfg.precision_bits * math.log10(2)))
    out.write(f"[{mpmath.nstr(lo, digits)}, {mpmath.nstr(hi, digits)}]\n")
    return EXIT_OK


def cmd_bias(args, cfg, out):
    key = bias.BiasKey(args.k, args.t)
    rows = [[b.r, b.rbar, fmt_sig(b.value.mid_fraction(), 15)] for b in bias.residue_biases(key, cfg.precision_bits)]
    emit_rows(["r", "rbar", "psi_kt"], rows, cfg.output_format, out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _fraction_arg(text: str) -> str:
    try:
        Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    return text


def _add_common(parser, nested: bool) -> None:
    # Subcommands accept the same options; SUPPRESS keeps them from clobbering
    # values given before the subcommand name.
    def default(value):
        return argparse.SUPPRESS if nested else value

    parser.add_argument("--prec", type=int, default=default(None),
                        help=f"working precision in bits ({MIN_PREC}..{MAX_PREC}); env {PREC_ENV}")
    parser.add_argument("--n-cap", type=int, default=default(exact_count.DEFAULT_N_CAP),
                        help="largest table size allowed")
    parser.add_argument("--threads", type=int, default=default(1), help="worker processes for scans")
    parser.add_argument("--format", choices=("csv", "json", "plain"), default=default(None), dest="output_format")
    parser.add_argument("--cache-dir", default=default(None), help=f"table cache directory; env {CACHE_ENV}")
    parser.add_argument("--no-cache", action="store_true", default=default(False),
                        help="neither read nor write cached tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kindiv", description=__doc__.splitlines()[0], allow_abbrev=False)
    _add_common(parser, nested=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _add_common(common, nested=True)

    p = sub.add_parser("exact", parents=[common], allow_abbrev=False, help="exact part count D_k^x(r, t; n)")
    for name in ("k", "t", "r", "n"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_exact, default_format="plain")

    p = sub.add_parser("qtable", parents=[common], allow_abbrev=False, help="exact count over estimate for a list of n")
    for name in ("k", "t", "r"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--n-list", required=True, help="comma-separated n values")
    p.add_argument("--method", choices=("dp", "pentagonal"), default="dp")
    p.set_defaults(func=cmd_qtable, default_format="csv")

    p = sub.add_parser("ordering", parents=[common], allow_abbrev=False, help="certified ordering of residues for one (k, t)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_ordering, default_format="plain")

    p = sub.add_parser("orderings", parents=[common], allow_abbrev=False, help="all orderings for modulus t, grouped by k")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k-max", type=int, default=None, help="override the search cap")
    p.set_defaults(func=cmd_orderings, default_format="plain")

    p = sub.add_parser("ocount", parents=[common], allow_abbrev=False, help="number of orderings against Euler's totient")
    p.add_argument("--t-min", type=int, required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.set_defaults(func=cmd_ocount, default_format="csv")

    p = sub.add_parser("verify", parents=[common], allow_abbrev=False, help="run a verification suite, JSON report on stdout")
    p.add_argument("--suite", required=True, choices=verify.SUITES)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--t-min", type=int, default=None)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--item", default=None, help="ordering property item: 1, 2, 3, 4, 5 or 5.4")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="grid override (JSON values)")
    p.add_argument("--manifest", default=None, help="JSON file overriding suite grids")
    p.add_argument("--full", action="store_true", help="extend ordering-count scans to t <= 200")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("digamma", parents=[common], allow_abbrev=False, help="certified enclosure of psi(x)")
    p.add_argument("--x", type=_fraction_arg, required=True)
    p.set_defaults(func=cmd_digamma, default_format="plain")

    p = sub.add_parser("bias", parents=[common], allow_abbrev=False, help="psi_{k,t}(r) for every residue")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_bias, default_format="csv")
    return parser


def resolve_config(args) -> CliConfig:
    prec = args.prec
    if prec is None and os.environ.get(PREC_ENV):
        try:
            prec = int(os.environ[PREC_ENV])
        except ValueError as exc:
            raise UsageError(f"{PREC_ENV} must be an integer") from exc
    prec = DEFAULT_PREC if prec is None else prec
    if not MIN_PREC <= prec <= MAX_PREC:
        raise UsageError(f"precision must lie in [{MIN_PREC}, {MAX_PREC}], got {prec}")
    if args.n_cap < 1:
        raise UsageError("--n-cap must be >= 1")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    cache = None
    if not args.no_cache:
        cache = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
    return CliConfig(prec, args.n_cap, args.threads, args.output_format or args.default_format, cache)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg, out)
    except (UsageError, DomainError, GuardError) as exc:
        print(f"kindiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, PrecisionError, UnresolvedComparisonError) as exc:
        print(f"kindiv: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except KindivError as exc:
        print(f"kindiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()

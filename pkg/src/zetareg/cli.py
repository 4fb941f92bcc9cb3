"""Command-line entry point.

    zetareg count FILE -m M
    zetareg zeta FILE -m M [--bound DN,DD]
    zetareg special-value FILE --at R -m M
    zetareg weight-homology FILE [--coefficients Z[1/p]]
    zetareg verify --scenario FILE [--scenario FILE ...] [--golden] [--jobs N]

FILE is a scenario JSON (only ``field``/``variety`` or ``snc`` are read by
the single-purpose commands).  Exit codes: 0 all targets match, 1 some
target failed, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import scenario as sc
from .errors import ParseError, ZetaRegError
from .geometry import count_sequence
from .weight import Lam, SNCConfig, build_snc_complex, weight_homology
from .zeta import special_value, zeta_from_counts

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def golden_paths() -> list[Path]:
    root = resources.files("zetareg").joinpath("data/golden")
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc


def _variety(path):
    data = _load_json(path)
    base = sc.parse_field(sc._need(data, "field", str(path)), f"{path}:field")
    return base, sc.parse_variety(sc._need(data, "variety", str(path)), base, f"{path}:variety")


def _bound(text):
    if text is None:
        return None
    dn, dd = (int(x) for x in text.split(","))
    return dn, dd


def cmd_count(args) -> int:
    _, X = _variety(args.file)
    counts = count_sequence(X, args.m, jobs=args.jobs)
    print(json.dumps({"counts": counts}))
    return EXIT_OK


def cmd_zeta(args) -> int:
    _, X = _variety(args.file)
    counts = count_sequence(X, args.m, jobs=args.jobs)
    Z = zeta_from_counts(counts, _bound(args.bound), args.guard)
    print(json.dumps({"counts": counts, "zeta": Z.to_json(), "text": str(Z)}, sort_keys=True))
    return EXIT_OK


def cmd_special_value(args) -> int:
    base, X = _variety(args.file)
    counts = count_sequence(X, args.m, jobs=args.jobs)
    Z = zeta_from_counts(counts, _bound(args.bound), args.guard)
    data = special_value(Z, base.size, args.at).to_json()
    data["zeta"] = str(Z)
    print(json.dumps(data, sort_keys=True))
    return EXIT_OK


def cmd_weight_homology(args) -> int:
    data = _load_json(args.file)
    cfg = SNCConfig.from_json(data.get("snc", data))
    ring = Lam.parse(args.coefficients)
    H = weight_homology(build_snc_complex(cfg, ring))
    print(json.dumps({"coefficients": str(ring), "homology": [g.to_json() for g in H],
                      "text": [str(g) for g in H]}, sort_keys=True))
    return EXIT_OK


def _verify_one(path: str, jobs: int):
    """(report or None, input error or None, seconds)."""
    start = time.perf_counter()
    try:
        s = sc.read_scenario(path)
    except ParseError as exc:
        return None, {"file": str(path), "error": str(exc)}, time.perf_counter() - start
    return sc.run_scenario(s, jobs), None, time.perf_counter() - start


def _table(reports, timings=None) -> str:
    lines = [f"{'scenario':<28} {'statement':<22} {'verdict':<17} lhs | rhs"]
    for k, rep in enumerate(reports):
        for t in rep["targets"]:
            stmt = t["statement"] + (f"({t['params']['r']})" if "r" in t.get("params", {}) else "")
            lhs = t.get("lhs", t.get("reason", ""))
            rhs = t.get("rhs", "")
            lines.append(f"{rep['scenario']:<28} {stmt:<22} {t['verdict']:<17} {lhs} | {rhs}")
        if timings is not None:
            lines.append(f"{'':<28} {'(time)':<22} {timings[k]:.3f}s")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    paths = [str(p) for p in (args.scenario or [])]
    if args.golden:
        paths += [str(p) for p in golden_paths()]
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, paths, [1] * len(paths)))
    else:
        results = [_verify_one(p, args.jobs) for p in paths]
    reports = [r for r, _, _ in results if r is not None]
    errors = [e for _, e, _ in results if e is not None]
    if args.json_out:
        out = Path(args.json_out)
        out.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            (out / f"{rep['scenario']}.json").write_text(sc.dumps(rep))
    if args.json:
        sys.stdout.write(sc.dumps({"reports": reports, "input_errors": errors}))
    else:
        if reports:
            print(_table(reports, [t for r, _, t in results if r is not None] if args.timings else None))
        for e in errors:
            print(f"input error: {e['error']}", file=sys.stderr)
    if errors:
        return EXIT_INPUT
    return EXIT_OK if all(sc.report_ok(r) for r in reports) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetareg", description="Zeta special values against regulator data")
    sub = ap.add_subparsers(dest="command", required=True)

    def counting(p):
        p.add_argument("file")
        p.add_argument("-m", type=int, default=6, help="number of point counts N_1..N_m")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--bound", help="degree bound DN,DD for reconstruction")
        p.add_argument("--guard", type=int, default=2)

    counting(sub.add_parser("count", help="point counts N_1..N_m"))
    counting(sub.add_parser("zeta", help="reconstruct Z(t) from point counts"))
    p = sub.add_parser("special-value", help="Laurent data of Z at t = q^-R")
    counting(p)
    p.add_argument("--at", type=int, required=True, metavar="R")
    p = sub.add_parser("weight-homology", help="weight homology of an SNC configuration")
    p.add_argument("file")
    p.add_argument("--coefficients", default="Z", help="Z or Z[1/p]")
    p = sub.add_parser("verify", help="run scenario files")
    p.add_argument("--scenario", action="append", metavar="FILE")
    p.add_argument("--golden", action="store_true", help="include the bundled golden scenarios")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true", help="print the JSON reports instead of the table")
    p.add_argument("--json-out", metavar="DIR", help="write one JSON report per scenario")
    p.add_argument("--timings", action="store_true", help="show wall-clock times in the table")
    return ap


COMMANDS = {
    "count": cmd_count,
    "zeta": cmd_zeta,
    "special-value": cmd_special_value,
    "weight-homology": cmd_weight_homology,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ZetaRegError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH if isinstance(exc, ZetaRegError) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

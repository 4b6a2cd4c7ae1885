"""Command-line interface.

Subcommands cover the three engines, snapshot verification, reachability
analysis and plot-data export.  Options come from a TOML config file plus
targeted flag overrides; every run writes a metadata header line carrying
enough information (config, seeds checksum, rng seed, network settings)
to reproduce it exactly.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 oracle
inconsistency (a record re-check disagreed with the oracle).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from fanosearch import __version__
from fanosearch.analysis import build_reports, distance_histogram, set_partition
from fanosearch.engines import run_exhaustive, run_fixed
from fanosearch.grdb import (
    GRDB_EXPECTED_ROWS,
    fetch_snapshot,
    load_snapshot,
    verify_snapshot,
    write_snapshot,
)
from fanosearch.oracle import FanoOracle, Verdict
from fanosearch.records import RecordWriter, read_records
from fanosearch.rl import RLHyperparameters, run_dynamic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ORACLE = 4


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {exc.filename}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None


def _cfg(cfg: dict, table: str, key: str, default=None):
    return cfg.get(table, {}).get(key, default)


def _make_oracle(cfg: dict, args) -> FanoOracle:
    cache = getattr(args, "cache", None) or _cfg(cfg, "oracle", "cache")
    fano_index = getattr(args, "fano_index", None) or _cfg(cfg, "run", "fano_index", 1)
    return FanoOracle(fano_index=fano_index, cache_path=cache)


def _load_seeds(cfg: dict, args) -> tuple[list, dict]:
    path = getattr(args, "seeds", None) or _cfg(cfg, "seeds", "path")
    if not path:
        raise ConfigError("no seed file given (flag --seeds or [seeds].path)")
    expected = _cfg(cfg, "seeds", "expected_rows")
    snapshot = load_snapshot(path, expected_rows=expected)
    offset = _cfg(cfg, "seeds", "offset", 0)
    limit = getattr(args, "seed_limit", None) or _cfg(cfg, "seeds", "limit")
    weights = snapshot.weights[offset : offset + limit if limit else None]
    info = {"path": snapshot.path, "sha256": snapshot.sha256, "count": len(weights), "offset": offset}
    return weights, info


def _metadata(cfg: dict, engine: str, extra: dict) -> dict:
    meta = {
        "engine": engine,
        "version": __version__,
        "config": cfg,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    meta.update(extra)
    return meta


def _emit_checked(oracle: FanoOracle, writer: RecordWriter):
    """Record sink that re-checks the verdict against the oracle on emit."""

    def sink(rec):
        if oracle.verdict(rec.weights).value != rec.verdict:
            raise OracleInconsistency(f"verdict mismatch on {rec.weights}")
        writer.write(rec)

    return sink


class OracleInconsistency(Exception):
    pass


def cmd_exhaustive(args) -> int:
    cfg = _load_config(args.config)
    d_max = args.d_max or _cfg(cfg, "run", "d_max")
    dimension = args.dimension or _cfg(cfg, "run", "dimension")
    if not d_max or not dimension:
        raise ConfigError("exhaustive needs --d-max and --dimension")
    fano_index = args.fano_index or _cfg(cfg, "run", "fano_index", 1)
    out = args.out or _cfg(cfg, "run", "records", "exhaustive_records.jsonl")
    run_id = args.run_id or _cfg(cfg, "run", "run_id", f"exhaustive-d{d_max}")
    oracle = _make_oracle(cfg, args)
    if not oracle.cache_path:
        oracle.memoize = False  # each point is visited once; skip the dict
    meta = _metadata(
        cfg, "exhaustive", {"d_max": d_max, "dimension": dimension, "fano_index": fano_index, "run_id": run_id}
    )
    with RecordWriter(out, meta) as writer:
        result = run_exhaustive(
            oracle,
            d_max,
            dimension,
            fano_index=fano_index,
            run_id=run_id,
            on_record=_emit_checked(oracle, writer),
        )
    if oracle.cache_path:
        oracle.save_cache()
    counts = result.found_by_verdict
    print(
        f"scanned {result.points_scanned} points, terminal: "
        f"{counts.get('terminal_qs', 0)} quasismooth + "
        f"{counts.get('terminal_nonqs', 0)} nonquasismooth -> {out}"
    )
    return EXIT_OK


def cmd_search_fixed(args) -> int:
    cfg = _load_config(args.config)
    s_max = args.s_max or _cfg(cfg, "run", "s_max")
    if not s_max:
        raise ConfigError("search-fixed needs --s-max")
    fano_index = args.fano_index or _cfg(cfg, "run", "fano_index", 1)
    out = args.out or _cfg(cfg, "run", "records", "fixed_records.jsonl")
    run_id = args.run_id or _cfg(cfg, "run", "run_id", "fixed")
    seeds, seed_info = _load_seeds(cfg, args)
    priority_const = args.priority_const
    if priority_const is None:
        priority_const = _cfg(cfg, "run", "priority_const")
    oracle = _make_oracle(cfg, args)
    meta = _metadata(
        cfg,
        "fixed",
        {
            "s_max": s_max,
            "fano_index": fano_index,
            "run_id": run_id,
            "seeds": seed_info,
            "priority_const": priority_const,
        },
    )
    with RecordWriter(out, meta) as writer:
        result = run_fixed(
            oracle,
            seeds,
            s_max,
            priority_const=priority_const,
            fano_index=fano_index,
            run_id=run_id,
            on_record=_emit_checked(oracle, writer),
        )
    if oracle.cache_path:
        oracle.save_cache()
    print(
        f"{result.steps} steps, {len(result.records)} reward points "
        f"({result.found_by_verdict}) -> {out}"
    )
    return EXIT_OK


def cmd_search_dynamic(args) -> int:
    cfg = _load_config(args.config)
    s_max = args.s_max or _cfg(cfg, "run", "s_max")
    if not s_max:
        raise ConfigError("search-dynamic needs --s-max")
    rl_cfg = dict(cfg.get("rl", {}))
    if args.seed is not None:
        rl_cfg["rng_seed"] = args.seed
    if args.sigma is not None:
        rl_cfg["sigma"] = args.sigma
    if "rng_seed" not in rl_cfg:
        raise ConfigError("search-dynamic needs an rng seed (--seed or [rl].rng_seed)")
    rl_cfg["s_max"] = s_max
    try:
        hyper = RLHyperparameters(**rl_cfg)
    except TypeError as exc:
        raise ConfigError(f"bad [rl] settings: {exc}") from None
    fano_index = args.fano_index or _cfg(cfg, "run", "fano_index", 1)
    out = args.out or _cfg(cfg, "run", "records", "dynamic_records.jsonl")
    telemetry_path = args.telemetry or _cfg(cfg, "run", "telemetry")
    run_id = args.run_id or _cfg(cfg, "run", "run_id", f"dynamic-seed{hyper.rng_seed}")
    seeds, seed_info = _load_seeds(cfg, args)
    oracle = _make_oracle(cfg, args)
    meta = _metadata(
        cfg,
        "dynamic",
        {
            "fano_index": fano_index,
            "run_id": run_id,
            "seeds": seed_info,
            "rl": hyper.as_dict(),
            "initialization": "fan_in_uniform",
        },
    )
    telemetry_writer = None
    if telemetry_path:
        telemetry_writer = RecordWriter(telemetry_path, {"run_id": run_id, "channel": "telemetry"})
    try:
        with RecordWriter(out, meta) as writer:
            result = run_dynamic(
                oracle,
                seeds,
                hyper,
                fano_index=fano_index,
                run_id=run_id,
                on_record=_emit_checked(oracle, writer),
                on_telemetry=telemetry_writer.write_obj if telemetry_writer else None,
            )
    finally:
        if telemetry_writer:
            telemetry_writer.close()
    if oracle.cache_path:
        oracle.save_cache()
    print(
        f"{result.steps} steps, {len(result.records)} reward points "
        f"({result.found_by_verdict}) -> {out}"
    )
    return EXIT_OK


def cmd_verify_grdb(args) -> int:
    snapshot = load_snapshot(args.snapshot, expected_rows=args.expect)
    oracle = _make_oracle(_load_config(args.config), args)
    report = verify_snapshot(snapshot, oracle)
    if oracle.cache_path:
        oracle.save_cache()
    print(f"snapshot: {snapshot.path} rows={len(snapshot)} sha256={snapshot.sha256}")
    for verdict, count in sorted(report.counts.items()):
        print(f"  {verdict}: {count}")
    ok = report.all_quasismooth_terminal
    print(
        f"{report.counts.get(Verdict.TERMINAL_QUASISMOOTH.value, 0)}/{report.total} "
        f"terminal quasismooth -> {'PASS' if ok else 'FAIL'}"
    )
    for w, verdict in report.mismatches:
        print(f"  mismatch: {w} -> {verdict}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "rows": len(snapshot),
                    "sha256": snapshot.sha256,
                    "counts": report.counts,
                    "pass": ok,
                    "mismatches": [[list(w), v] for w, v in report.mismatches],
                },
                fh,
                indent=2,
            )
    if args.require_pass and not ok:
        return 1
    return EXIT_OK


def cmd_make_seeds(args) -> int:
    """Generate a quasismooth-terminal seed file from an exhaustive sweep."""
    oracle = _make_oracle(_load_config(args.config), args)
    result = run_exhaustive(oracle, args.d_max, args.dimension, fano_index=args.fano_index or 1)
    qs = [r.weights for r in result.records if r.verdict == Verdict.TERMINAL_QUASISMOOTH.value]
    if args.limit:
        qs = qs[: args.limit]
    if not qs:
        print("no quasismooth terminal families in range", file=sys.stderr)
        return EXIT_CONFIG
    digest = write_snapshot(args.out, qs)
    if oracle.cache_path:
        oracle.save_cache()
    print(f"wrote {len(qs)} seeds (d <= {args.d_max}) sha256={digest} -> {args.out}")
    return EXIT_OK


def cmd_fetch_grdb(args) -> int:
    snapshot = fetch_snapshot(args.url, args.out)
    print(f"fetched {len(snapshot)} rows sha256={snapshot.sha256} -> {args.out}")
    return EXIT_OK


def _reward_weight_set(path: str) -> set:
    _, records = read_records(path)
    return {tuple(r.weights) for r in records}


def cmd_analyze(args) -> int:
    fixed = _reward_weight_set(args.fixed)
    dynamic = _reward_weight_set(args.dynamic)
    seeds: list = []
    if args.seeds:
        seeds = load_snapshot(args.seeds, expected_rows=None).weights
    only_f, only_d, both = set_partition(fixed, dynamic)
    os.makedirs(args.out_dir, exist_ok=True)
    summary = {
        "fixed_total": len(fixed),
        "dynamic_total": len(dynamic),
        "fixed_only": len(only_f),
        "dynamic_only": len(only_d),
        "intersection": len(both),
    }
    jobs = [
        ("fixed_only", sorted(only_f), sorted(dynamic | set(seeds))),
        ("dynamic_only", sorted(only_d), sorted(fixed | set(seeds))),
    ]
    for name, a_pts, b_pts in jobs:
        if not a_pts or not b_pts:
            summary[f"{name}_reports"] = 0
            continue
        reports = build_reports(a_pts, b_pts, max_bound_distance=args.max_bound_distance)
        rep_path = os.path.join(args.out_dir, f"{name}_reports.jsonl")
        with open(rep_path, "w", encoding="utf-8") as fh:
            for rep in reports:
                fh.write(json.dumps(rep.to_dict(), separators=(",", ":")) + "\n")
        hist = distance_histogram(reports)
        hist_path = os.path.join(args.out_dir, f"{name}_distance_histogram.csv")
        with open(hist_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["distance", "count"])
            for dist, count in hist.items():
                writer.writerow([dist, count])
        summary[f"{name}_reports"] = len(reports)
    summary_path = os.path.join(args.out_dir, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_export_plot_data(args) -> int:
    if args.kind == "reward_vs_steps":
        rows = []
        for path in args.records:
            meta, records = read_records(path)
            engine = meta.get("engine", "unknown")
            count = 0
            for rec in sorted(records, key=lambda r: r.step):
                count += 1
                rows.append((engine, rec.step, count))
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["engine", "step", "cumulative"])
            writer.writerows(rows)
        print(f"wrote {len(rows)} rows -> {args.out}")
        return EXIT_OK
    raise ConfigError(f"unknown export kind {args.kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanosearch",
        description="search for terminal Fano hypersurfaces on the weight lattice",
    )
    parser.add_argument("--version", action="version", version=f"fanosearch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--cache", help="oracle cache file (warmed if present)")
        p.add_argument("--fano-index", type=int, dest="fano_index")
        p.add_argument("--run-id", dest="run_id")

    p = sub.add_parser("exhaustive", help="classify every cone point up to a degree bound")
    common(p)
    p.add_argument("--d-max", type=int, dest="d_max")
    p.add_argument("--dimension", type=int, help="hypersurface dimension n (n+2 weights)")
    p.add_argument("--out", help="records JSONL path")
    p.set_defaults(func=cmd_exhaustive)

    p = sub.add_parser("search-fixed", help="fixed-heuristic best-first search")
    common(p)
    p.add_argument("--s-max", type=int, dest="s_max")
    p.add_argument("--seeds", help="seed CSV (a1..a6 header)")
    p.add_argument("--seed-limit", type=int, dest="seed_limit")
    p.add_argument("--priority-const", type=float, dest="priority_const",
                   help="override the halving heuristic with a constant priority")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search_fixed)

    p = sub.add_parser("search-dynamic", help="value-network-guided stochastic search")
    common(p)
    p.add_argument("--s-max", type=int, dest="s_max")
    p.add_argument("--seeds", help="seed CSV (a1..a6 header)")
    p.add_argument("--seed-limit", type=int, dest="seed_limit")
    p.add_argument("--seed", type=int, help="rng seed (mandatory unless in config)")
    p.add_argument("--sigma", type=float, help="exploration noise std-dev")
    p.add_argument("--out")
    p.add_argument("--telemetry", help="per-step training telemetry JSONL")
    p.set_defaults(func=cmd_search_dynamic)

    p = sub.add_parser("verify-grdb", help="classify every snapshot row against the oracle")
    common(p)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--expect", type=int, default=GRDB_EXPECTED_ROWS,
                   help="expected row count (warn when different)")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--require-pass", action="store_true", dest="require_pass")
    p.set_defaults(func=cmd_verify_grdb)

    p = sub.add_parser("make-seeds", help="generate quasismooth seeds by exhaustive sweep")
    common(p)
    p.add_argument("--d-max", type=int, required=True, dest="d_max")
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_seeds)

    p = sub.add_parser("fetch-grdb", help="download a snapshot CSV (needs network)")
    p.add_argument("--url", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch_grdb)

    p = sub.add_parser("analyze", help="set differences, distances and step bounds")
    p.add_argument("--fixed", required=True, help="fixed-engine records JSONL")
    p.add_argument("--dynamic", required=True, help="dynamic-engine records JSONL")
    p.add_argument("--seeds", help="seed CSV included in the nearest-neighbour sets")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--max-bound-distance", type=int, default=25, dest="max_bound_distance")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export-plot-data", help="derive plot-ready CSVs from records")
    p.add_argument("--records", nargs="+", required=True)
    p.add_argument("--kind", required=True, choices=["reward_vs_steps"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_plot_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleInconsistency as exc:
        print(f"oracle inconsistency: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``fakemark <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 validation or domain error,
4 I/O error. All randomness is controlled by explicit ``--seed`` flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import analytics, experiments
from .attacks import AttackSpec, delete_random
from .baseline import BaselineParams, baseline_embed, baseline_extract, combination_votes, generate_pool
from .codebook import WatermarkSequence, assign, default_user_ids, watermark_length
from .errors import DomainError, FakemarkError, TransportError
from .fakegen import ENDPOINT_ENV, TIMEOUT_ENV, GeneratorSpec, generate
from .metadata import (
    BaselineMetadata,
    WatermarkMetadata,
    load_baseline_metadata,
    load_metadata,
    save_baseline_metadata,
    save_metadata,
)
from .sample import KEY_COLUMN, sample_table
from .store import Table, load_table, save_table
from .watermark import SchemeParams, embed, extract, identify, user_seed

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(doc: object) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _load_db(args) -> Table:
    return load_table(args.db, has_header=not args.no_header)


def _parse_p_values(text: str) -> list[float]:
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise DomainError("p range step must be positive")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(v) for v in text.split(",")]


# ---------------------------------------------------------------- commands


def cmd_assign(args) -> int:
    if args.user_ids:
        users = [u.strip() for u in args.user_ids.split(",") if u.strip()]
    else:
        users = default_user_ids(args.users)
    params = SchemeParams.for_users(len(users), args.x, args.seed)
    meta = WatermarkMetadata(params=params, codebook=assign(users, params.L))
    save_metadata(meta, args.out)
    if args.format == "json":
        _emit(_json([{"user": u, "watermark": str(w)} for u, w in meta.codebook.entries]), None)
    else:
        for u, w in meta.codebook.entries:
            print(f"{u}\t{w}")
    return EXIT_OK


def cmd_genfake(args) -> int:
    meta = load_metadata(args.meta)
    table = _load_db(args)
    seed = meta.params.seed if args.seed is None else args.seed
    spec = GeneratorSpec(
        kind=args.generator, seed=seed, endpoint=args.endpoint, max_retries=args.max_retries, timeout=args.timeout
    )
    tf = generate(table, meta.params.L, meta.params.x, spec, key_column=args.key_column)
    save_metadata(meta.with_fakes(tf, args.key_column), args.out or args.meta)
    print(f"generated {tf.L} groups x {tf.x} fake tuples", file=sys.stderr)
    return EXIT_OK


def cmd_embed(args) -> int:
    meta = load_metadata(args.meta)
    tf = meta.require_fakes()
    table = _load_db(args)
    index = meta.codebook.index_of(args.user)
    seed = user_seed(meta.params.seed, index) if args.seed is None else args.seed
    marked = embed(table, meta.codebook.watermark_of(args.user), tf, seed)
    save_table(marked, args.out)
    print(f"inserted {marked.n - table.n} fake tuples for {args.user}", file=sys.stderr)
    return EXIT_OK


def cmd_extract(args) -> int:
    meta = load_metadata(args.meta)
    table = _load_db(args)
    result = identify(extract(table, meta.require_fakes()), meta.codebook)
    if args.format == "json":
        _emit(_json(result.to_dict()), None)
    else:
        print(f"extracted: {result.extracted}")
        print(f"exact match: {result.exact_match or '-'}")
        for user, d in result.suspects:
            print(f"  {user}\t{d}")
    return EXIT_OK


def cmd_attack(args) -> int:
    table = _load_db(args)
    attacked = delete_random(table, AttackSpec(args.p, args.seed))
    save_table(attacked, args.out)
    print(f"deleted {table.n - attacked.n} of {table.n} rows", file=sys.stderr)
    return EXIT_OK


def cmd_theory(args) -> int:
    if args.L is None and args.users is None:
        args.users = experiments.DEFAULT_N_U
    L = args.L if args.L is not None else watermark_length(args.users)
    n_u = args.users if args.users is not None else 1 << L
    points = [analytics.theory_point(args.n, p, args.x, L, n_u) for p in _parse_p_values(args.p)]
    header = list(points[0].as_row()) if points else []
    lines = [",".join(header)]
    for pt in points:
        lines.append(",".join(experiments._fmt(v) for v in pt.as_row().values()))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _experiment_table(args, config: dict) -> tuple[Table, str | None]:
    path = args.db or config.get("table")
    if path:
        key_column = args.key_column if args.key_column is not None else config.get("key_column")
        return load_table(path), key_column
    n = int(config.get("n", experiments.DEFAULT_TABLE_SIZE))
    return sample_table(n, seed=int(config.get("table_seed", 0))), KEY_COLUMN


def cmd_experiment(args) -> int:
    config = experiments.load_config(args.config)
    if args.trials is not None:
        config["trials"] = args.trials
    if args.seed is not None:
        config["base_seed"] = args.seed
    grid = experiments.grid_from_dict(config, args.kind)
    if args.kind == "transparency":
        x = grid.x_values[0]
        points = experiments.run_transparency(grid.n_u_values, x)
        _emit(experiments.transparency_to_csv(points), args.out)
        if args.plot_data:
            _emit(experiments.transparency_to_csv(points), args.plot_data)
        return EXIT_OK
    table, key_column = _experiment_table(args, config)
    workers = args.workers or int(config.get("workers", 1))
    runner = experiments.run_comparison if args.kind == "comparison" else experiments.run_robustness
    records = runner(table, grid, key_column=key_column, workers=workers)
    _emit(experiments.records_to_csv(records), args.out)
    if args.plot_data:
        _emit(experiments.aggregates_to_csv(experiments.aggregate(records)), args.plot_data)
    return EXIT_OK


def cmd_baseline_embed(args) -> int:
    table = _load_db(args)
    w = WatermarkSequence.from_str(args.watermark)
    if os.path.exists(args.meta) and not args.regenerate:
        bmeta = load_baseline_metadata(args.meta)
    else:
        params = BaselineParams(L=len(w), x=args.x, key=args.key.encode("utf-8"))
        pool = generate_pool(table, params, seed=args.seed, key_column=args.key_column)
        bmeta = BaselineMetadata(params, pool, args.key_column)
        save_baseline_metadata(bmeta, args.meta)
    marked = baseline_embed(table, w, bmeta.params, bmeta.pool, seed=args.seed)
    save_table(marked, args.out)
    print(f"inserted {marked.n - table.n} fake tuples", file=sys.stderr)
    return EXIT_OK


def cmd_baseline_extract(args) -> int:
    bmeta = load_baseline_metadata(args.meta)
    table = _load_db(args)
    w = baseline_extract(table, bmeta.params, bmeta.pool, seed=args.seed)
    votes = combination_votes(table, bmeta.params, bmeta.pool)
    doc = {"extracted": str(w), "votes": [{"10": int(a), "01": int(b)} for a, b in votes]}
    if args.format == "json":
        _emit(_json(doc), None)
    else:
        print(f"extracted: {w}")
    return EXIT_OK


def cmd_sample(args) -> int:
    save_table(sample_table(args.n, args.seed), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fakemark",
        description="Fingerprint CSV tables with fake tuples and trace leaked copies.",
        epilog=f"Environment: ${ENDPOINT_ENV} and ${TIMEOUT_ENV} configure the external generator; "
        "FAKEMARK_DISABLE_NUMBA=1 forces the pure-numpy kernels.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def db_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--db", required=True, help="input CSV table")
        p.add_argument("--no-header", action="store_true", help="the CSV has no header row")

    def fmt(p: argparse.ArgumentParser, default: str) -> None:
        p.add_argument("--format", choices=("text", "json"), default=default)

    p = sub.add_parser("assign", help="build the sparse-priority codebook")
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--users", type=int, help="number of users (ids user000, user001, ...)")
    who.add_argument("--user-ids", help="comma-separated user ids")
    p.add_argument("--x", type=int, default=experiments.DEFAULT_X, help="fake tuples per group (default 5)")
    p.add_argument("--seed", type=int, default=0, help="scheme seed (default 0)")
    p.add_argument("--out", required=True, help="metadata JSON to write")
    fmt(p, "text")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("genfake", help="generate fake tuples into the metadata")
    db_args(p)
    p.add_argument("--meta", required=True)
    p.add_argument("--key-column", help="synthetic primary key column excluded from matching")
    p.add_argument("--seed", type=int, help="generator seed (default: the scheme seed)")
    p.add_argument("--generator", choices=("mimic", "external"), default="mimic")
    p.add_argument("--endpoint", help=f"generator service URL (default ${ENDPOINT_ENV})")
    p.add_argument("--timeout", type=float, help=f"service timeout in seconds (default ${TIMEOUT_ENV} or 30)")
    p.add_argument("--max-retries", type=int, default=20)
    p.add_argument("--out", help="metadata output (default: overwrite --meta)")
    p.set_defaults(func=cmd_genfake)

    p = sub.add_parser("embed", help="produce one user's watermarked copy")
    db_args(p)
    p.add_argument("--meta", required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--seed", type=int, help="placement seed (default: scheme seed XOR user index)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="extract the watermark and rank suspects")
    db_args(p)
    p.add_argument("--meta", required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="delete a random share of rows")
    db_args(p)
    p.add_argument("--p", type=float, required=True, help="deletion ratio in [0, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("theory", help="closed-form robustness table as CSV")
    p.add_argument("--n", type=int, default=experiments.DEFAULT_TABLE_SIZE)
    p.add_argument("--x", type=int, default=experiments.DEFAULT_X)
    p.add_argument("--L", type=int, help="watermark length (default: derived from --users)")
    p.add_argument("--users", type=int, help="number of users (default 50, or 2**L when --L is given)")
    p.add_argument("--p", default="0.1:0.9:0.1", help="start:stop:step or comma list")
    p.add_argument("--out", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("experiment", help="run a seeded experiment grid")
    p.add_argument("kind", choices=("robustness", "transparency", "comparison"))
    p.add_argument("--config", help="grid JSON (x_values, p_values, n_u_values, trials, base_seed, table, n)")
    p.add_argument("--db", help="carrier table (default: bundled synthetic sample)")
    p.add_argument("--key-column")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="base seed (overrides the config)")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="results CSV (default stdout)")
    p.add_argument("--plot-data", help="write per-point aggregated series here")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("baseline-embed", help="embed with the comparison scheme")
    db_args(p)
    p.add_argument("--meta", required=True, help="baseline metadata (created when missing)")
    p.add_argument("--watermark", required=True, help="bitstring to embed")
    p.add_argument("--x", type=int, default=experiments.DEFAULT_X)
    p.add_argument("--key", default="fakemark-baseline", help="secret hashing key")
    p.add_argument("--key-column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regenerate", action="store_true", help="rebuild the fake pool even if --meta exists")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline_embed)

    p = sub.add_parser("baseline-extract", help="extract with the comparison scheme")
    db_args(p)
    p.add_argument("--meta", required=True)
    p.add_argument("--seed", type=int, default=0, help="seed of the tie-breaking coin")
    fmt(p, "json")
    p.set_defaults(func=cmd_baseline_extract)

    p = sub.add_parser("sample", help="write the bundled synthetic table")
    p.add_argument("--n", type=int, default=experiments.DEFAULT_TABLE_SIZE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except TransportError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FakemarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

"""Seeded experiment grids: robustness, transparency and scheme comparison.

Every trial draws its randomness from a seed derived from
``(base_seed, n_u, x, p, trial)``, so any sub-grid reproduces the same
records, and the output order is canonical regardless of worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .analytics import ni_bound, ni_expected, p_cd_from_count
from .attacks import AttackSpec, delete_random, deletion_count
from .baseline import BaselineParams, baseline_embed, baseline_extract, combination_votes, generate_pool
from .codebook import Codebook, WatermarkSequence, assign, default_user_ids, hamming, watermark_length
from .errors import DomainError, FakemarkError
from .fakegen import GeneratorSpec, generate
from .store import Table
from .watermark import embed, extract, rank_suspects, surviving_counts

DEFAULT_P_VALUES = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_X_VALUES = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
DEFAULT_N_U = 50
DEFAULT_X = 5
DEFAULT_TRIALS = 50
DEFAULT_TABLE_SIZE = 10_000
TRANSPARENCY_N_U = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
SCHEMES = ("spsw", "baseline")


class ExperimentError(FakemarkError):
    """A module error raised while running one grid point."""


@dataclass(frozen=True)
class ExperimentGrid:
    x_values: tuple[int, ...] = DEFAULT_X_VALUES
    p_values: tuple[float, ...] = DEFAULT_P_VALUES
    n_u_values: tuple[int, ...] = (DEFAULT_N_U,)
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0

    def __post_init__(self) -> None:
        for name in ("x_values", "p_values", "n_u_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise DomainError(f"{name} must not be empty")
            object.__setattr__(self, name, values)
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if any(x < 1 for x in self.x_values):
            raise DomainError("x values must be >= 1")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise DomainError("p values must lie in [0, 1]")
        if any(n_u < 2 for n_u in self.n_u_values):
            raise DomainError("n_u values must be >= 2")

    def points(self) -> list[tuple[int, int, float]]:
        return [(n_u, x, p) for n_u in self.n_u_values for x in self.x_values for p in self.p_values]


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    n: int
    n_u: int
    x: int
    p: float
    trial: int
    seed: int
    user: str
    watermark: str
    extracted: str
    exact_match: bool
    bit_accuracy: float
    suspect_rank_of_truth: int
    ones: int
    inserted: int
    n_embedded: int
    groups_embedded: int
    groups_wiped: int


RECORD_COLUMNS = tuple(f.name for f in fields(TrialRecord))


def derive_seed(base_seed: int, *parts: object) -> int:
    text = repr((int(base_seed),) + tuple(parts)).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big") >> 1


@lru_cache(maxsize=64)
def _codebook(n_u: int) -> Codebook:
    return assign(default_user_ids(n_u), watermark_length(n_u))


@dataclass(frozen=True)
class _TrialPlan:
    seed: int
    user_index: int
    fake_seed: int
    embed_seed: int
    attack_seed: int


def _plan(base_seed: int, n_u: int, x: int, p: float, trial: int) -> _TrialPlan:
    seed = derive_seed(base_seed, n_u, x, float(p), trial)
    rng = np.random.default_rng(seed)
    user_index = int(rng.integers(n_u))
    fake_seed, embed_seed, attack_seed = (int(s) for s in rng.integers(0, 2**63, size=3))
    return _TrialPlan(seed, user_index, fake_seed, embed_seed, attack_seed)


def _bit_accuracy(a: WatermarkSequence, b: WatermarkSequence) -> float:
    return 1.0 - hamming(a, b) / len(a)


def _rank_of(user: str, ranking: Sequence[tuple[str, int]], n_u: int) -> int:
    for i, (u, _) in enumerate(ranking):
        if u == user:
            return i + 1
    return n_u + 1


def _hamming_ranking(w_prime: WatermarkSequence, codebook: Codebook) -> list[tuple[str, int]]:
    ranked = sorted((hamming(w_prime, w), i, u) for i, (u, w) in enumerate(codebook.entries))
    return [(u, d) for d, _, u in ranked]


def spsw_trial(
    table: Table, key_column: str | None, n_u: int, x: int, p: float, trial: int, base_seed: int
) -> TrialRecord:
    plan = _plan(base_seed, n_u, x, p, trial)
    codebook = _codebook(n_u)
    user, w = codebook.entries[plan.user_index]
    tf = generate(table, codebook.L, x, GeneratorSpec(seed=plan.fake_seed), key_column=key_column)
    marked = embed(table, w, tf, plan.embed_seed)
    attacked = delete_random(marked, AttackSpec(p, plan.attack_seed))
    w_prime = extract(attacked, tf)
    kept = surviving_counts(attacked, tf)
    ones = w.popcount()
    return TrialRecord(
        scheme="spsw",
        n=table.n,
        n_u=n_u,
        x=x,
        p=p,
        trial=trial,
        seed=plan.seed,
        user=user,
        watermark=str(w),
        extracted=str(w_prime),
        exact_match=w_prime == w,
        bit_accuracy=_bit_accuracy(w, w_prime),
        suspect_rank_of_truth=_rank_of(user, rank_suspects(w_prime, codebook), n_u),
        ones=ones,
        inserted=marked.n - table.n,
        n_embedded=marked.n,
        groups_embedded=ones,
        groups_wiped=sum(1 for bit, c in zip(w.bits, kept) if bit and c == 0),
    )


def baseline_trial(
    table: Table, key_column: str | None, n_u: int, x: int, p: float, trial: int, base_seed: int
) -> TrialRecord:
    plan = _plan(base_seed, n_u, x, p, trial)
    codebook = _codebook(n_u)
    user, w = codebook.entries[plan.user_index]
    params = BaselineParams(codebook.L, x, key=derive_seed(base_seed, "baseline-key").to_bytes(8, "big"))
    pool = generate_pool(table, params, seed=plan.fake_seed, key_column=key_column)
    marked = baseline_embed(table, w, params, pool, seed=plan.embed_seed)
    attacked = delete_random(marked, AttackSpec(p, plan.attack_seed))
    w_prime = baseline_extract(attacked, params, pool, seed=plan.seed)
    votes = combination_votes(attacked, params, pool)
    return TrialRecord(
        scheme="baseline",
        n=table.n,
        n_u=n_u,
        x=x,
        p=p,
        trial=trial,
        seed=plan.seed,
        user=user,
        watermark=str(w),
        extracted=str(w_prime),
        exact_match=w_prime == w,
        bit_accuracy=_bit_accuracy(w, w_prime),
        suspect_rank_of_truth=_rank_of(user, _hamming_ranking(w_prime, codebook), n_u),
        ones=w.popcount(),
        inserted=marked.n - table.n,
        n_embedded=marked.n,
        groups_embedded=codebook.L,
        groups_wiped=int((votes.sum(axis=1) == 0).sum()),
    )


_TRIALS = {"spsw": spsw_trial, "baseline": baseline_trial}


def _run_point(args) -> list[TrialRecord]:
    table, key_column, schemes, n_u, x, p, trials, base_seed = args
    out = []
    try:
        for t in range(trials):
            for scheme in schemes:
                out.append(_TRIALS[scheme](table, key_column, n_u, x, p, t, base_seed))
    except FakemarkError as exc:
        raise ExperimentError(f"grid point n_u={n_u}, x={x}, p={p}: {exc}") from exc
    return out


def _run(
    table: Table,
    grid: ExperimentGrid,
    schemes: Sequence[str],
    key_column: str | None,
    workers: int,
) -> list[TrialRecord]:
    tasks = [
        (table, key_column, tuple(schemes), n_u, x, p, grid.trials, grid.base_seed)
        for n_u, x, p in grid.points()
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, tasks))
    else:
        chunks = [_run_point(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    order = {s: i for i, s in enumerate(SCHEMES)}
    records.sort(key=lambda r: (r.n_u, r.x, r.p, r.trial, order[r.scheme]))
    return records


def run_robustness(
    table: Table, grid: ExperimentGrid, key_column: str | None = None, workers: int = 1
) -> list[TrialRecord]:
    return _run(table, grid, ("spsw",), key_column, workers)


def run_comparison(
    table: Table, grid: ExperimentGrid, key_column: str | None = None, workers: int = 1
) -> list[TrialRecord]:
    """Paired records: both schemes see the same user and attack seed per trial."""
    return _run(table, grid, SCHEMES, key_column, workers)


@dataclass(frozen=True)
class TransparencyPoint:
    n_u: int
    L: int
    x: int
    measured_ni: float
    bound: float
    baseline_ni: int
    full_codebook: bool

    @property
    def below_bound(self) -> bool:
        return self.measured_ni < self.bound


def run_transparency(n_u_values: Iterable[int] = TRANSPARENCY_N_U, x: int = DEFAULT_X) -> list[TransparencyPoint]:
    out = []
    for n_u in n_u_values:
        L = watermark_length(n_u)
        out.append(
            TransparencyPoint(
                n_u=n_u,
                L=L,
                x=x,
                measured_ni=ni_expected(_codebook(n_u), x),
                bound=ni_bound(x, n_u),
                baseline_ni=x * L,
                full_codebook=n_u == 1 << L,
            )
        )
    return out


# ------------------------------------------------------------------ output


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in RECORD_COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kwargs = {}
        for name, value in row.items():
            kind = types[name]
            if kind == "bool":
                kwargs[name] = value == "1"
            elif kind == "int":
                kwargs[name] = int(value)
            elif kind == "float":
                kwargs[name] = float(value)
            else:
                kwargs[name] = value
        out.append(TrialRecord(**kwargs))
    return out


def transparency_to_csv(points: Iterable[TransparencyPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n_u", "L", "x", "measured_ni", "bound", "baseline_ni", "full_codebook"])
    for pt in points:
        writer.writerow([_fmt(v) for v in asdict(pt).values()])
    return buf.getvalue()


@dataclass(frozen=True)
class Aggregate:
    scheme: str
    n_u: int
    x: int
    p: float
    trials: int
    cr_exact: float
    cr_bits: float
    cr_suspect: float
    mean_inserted: float
    predicted_exact: float


def predicted_exact(records: Sequence[TrialRecord], L: int | None = None) -> float:
    """Model prediction for the exact-match rate of one grid point.

    spsw: mean over trials of ``(1 - p_cd) ** popcount`` with the exact
    hypergeometric ``p_cd`` for that trial's table size. Baseline:
    ``(1 - P/2) ** L`` with ``P`` the observed group wipe-out frequency.
    """
    if not records:
        return float("nan")
    if records[0].scheme == "spsw":
        return float(np.mean([exact_match_probability(r) for r in records]))
    L = L if L is not None else records[0].groups_embedded
    wiped = sum(r.groups_wiped for r in records) / (L * len(records))
    return (1.0 - wiped / 2) ** L


def bit_survival_probability(r: TrialRecord) -> float:
    d = deletion_count(r.n_embedded, r.p)
    return 1.0 - p_cd_from_count(r.n_embedded, d, r.x)


def exact_match_probability(r: TrialRecord) -> float:
    return bit_survival_probability(r) ** r.ones


def aggregate(records: Iterable[TrialRecord]) -> list[Aggregate]:
    buckets: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        buckets.setdefault((SCHEMES.index(r.scheme), r.n_u, r.x, r.p), []).append(r)
    out = []
    for (_, n_u, x, p), rs in sorted(buckets.items()):
        out.append(
            Aggregate(
                scheme=rs[0].scheme,
                n_u=n_u,
                x=x,
                p=p,
                trials=len(rs),
                cr_exact=sum(r.exact_match for r in rs) / len(rs),
                cr_bits=float(np.mean([r.bit_accuracy for r in rs])),
                cr_suspect=sum(r.suspect_rank_of_truth == 1 for r in rs) / len(rs),
                mean_inserted=float(np.mean([r.inserted for r in rs])),
                predicted_exact=predicted_exact(rs),
            )
        )
    return out


def aggregates_to_csv(aggs: Iterable[Aggregate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(Aggregate)]
    writer.writerow(names)
    for a in aggs:
        writer.writerow([_fmt(getattr(a, n)) for n in names])
    return buf.getvalue()


# ------------------------------------------------------------ statistics


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """Distribution of the number of successes among independent Bernoulli trials."""
    pmf = np.zeros(len(probs) + 1)
    pmf[0] = 1.0
    for i, q in enumerate(probs):
        pmf[1 : i + 2] = pmf[1 : i + 2] * (1.0 - q) + pmf[: i + 1] * q
        pmf[0] *= 1.0 - q
    return pmf


def acceptance_region(probs: Sequence[float], level: float = 0.99) -> tuple[int, int]:
    """Equal-tailed interval ``[lo, hi]`` holding at least ``level`` of the success count."""
    cdf = np.cumsum(poisson_binomial_pmf(probs))
    alpha = (1.0 - level) / 2
    tol = 1e-12
    lo = int(np.searchsorted(cdf, alpha - tol, side="left"))
    hi = int(np.searchsorted(cdf, 1.0 - alpha - tol, side="left"))
    return lo, min(hi, len(probs))


def mc_sigma(rate: float, trials: int) -> float:
    return math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)


# ------------------------------------------------------------------- config


def grid_from_dict(doc: dict, kind: str = "robustness") -> ExperimentGrid:
    defaults = default_grid(kind)
    return ExperimentGrid(
        x_values=tuple(int(v) for v in doc.get("x_values", defaults.x_values)),
        p_values=tuple(float(v) for v in doc.get("p_values", defaults.p_values)),
        n_u_values=tuple(int(v) for v in doc.get("n_u_values", defaults.n_u_values)),
        trials=int(doc.get("trials", defaults.trials)),
        base_seed=int(doc.get("base_seed", defaults.base_seed)),
    )


def default_grid(kind: str = "robustness") -> ExperimentGrid:
    if kind == "comparison":
        return ExperimentGrid(x_values=(DEFAULT_X,))
    if kind == "transparency":
        return ExperimentGrid(x_values=(DEFAULT_X,), n_u_values=TRANSPARENCY_N_U)
    return ExperimentGrid()


def load_config(path: str | os.PathLike | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

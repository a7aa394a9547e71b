"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary.
"""

import math

import pytest

from conftest import ACCEPTANCE_LINES
from fakemark.analytics import (
    ep_sparse,
    ep_uniform,
    ep_uniform_sum,
    p_cd_approx,
    p_cd_exact,
    p_cd_from_count,
)
from fakemark.attacks import deletion_count, exhaustive_complete_deletion
from fakemark.codebook import assign, default_user_ids, watermark_length
from fakemark.experiments import (
    ExperimentGrid,
    acceptance_region,
    aggregate,
    aggregates_to_csv,
    bit_survival_probability,
    exact_match_probability,
    mc_sigma,
    records_to_csv,
    run_comparison,
    run_robustness,
    run_transparency,
    transparency_to_csv,
)
from fakemark.fakegen import GeneratorSpec, generate
from fakemark.sample import KEY_COLUMN, sample_table
from fakemark.watermark import embed_all, extract

P_VALUES = tuple(round(0.1 * i, 1) for i in range(1, 10))
ROBUST_X = (1, 3, 5, 10)
N_U_SWEEP = (10, 30, 50, 100)
TRIALS = 50
BASE_SEED = 0

pytestmark = pytest.mark.slow


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def table():
    return sample_table(10_000, seed=0)


@pytest.fixture(scope="module")
def robustness(table):
    grid = ExperimentGrid(x_values=ROBUST_X, p_values=P_VALUES, n_u_values=(50,), trials=TRIALS, base_seed=BASE_SEED)
    return run_robustness(table, grid, key_column=KEY_COLUMN)


@pytest.fixture(scope="module")
def comparison(table):
    grid = ExperimentGrid(x_values=(5,), p_values=P_VALUES, n_u_values=(50,), trials=TRIALS, base_seed=BASE_SEED)
    return run_comparison(table, grid, key_column=KEY_COLUMN)


@pytest.fixture(scope="module")
def user_sweep(table):
    grid = ExperimentGrid(x_values=(5,), p_values=P_VALUES, n_u_values=N_U_SWEEP, trials=TRIALS, base_seed=BASE_SEED)
    return run_robustness(table, grid, key_column=KEY_COLUMN)


def test_criterion_1_round_trip():
    carrier = sample_table(2_000, seed=11)
    failures = []
    cases = 0
    for n_u in (2, 3, 50):
        L = watermark_length(n_u)
        codebook = assign(default_user_ids(n_u), L)
        for x in (1, 5):
            tf = generate(carrier, L, x, GeneratorSpec(seed=n_u * 10 + x), key_column=KEY_COLUMN)
            for (user, marked), (_, w) in zip(embed_all(carrier, codebook, tf, seed=3), codebook.entries):
                cases += 1
                if extract(marked, tf) != w:
                    failures.append((n_u, x, user))
    report(1, not failures, f"{cases} user copies round-tripped, {len(failures)} mismatches")


def test_criterion_2_wipeout_oracle():
    worst = 0.0
    checked = 0
    for n in range(1, 21):
        for x in range(1, n + 1):
            for d in range(n + 1):
                assert deletion_count(n, d / n) == d
                got = p_cd_exact(n, d / n, x)
                worst = max(worst, abs(got - float(exhaustive_complete_deletion(n, x, d))))
                checked += 1
    above = [
        (n, p, x)
        for n in (10, 100, 1_000, 10_000)
        for p in P_VALUES
        for x in range(1, 11)
        if p_cd_exact(n, p, x) > p_cd_approx(p, x)
    ]
    ok = worst < 1e-12 and not above
    report(2, ok, f"{checked} enumerated cases, max error {worst:.2e}; {len(above)} grid points above p^x")


def test_criterion_3_binomial_identity():
    worst = max(
        abs(ep_uniform_sum(i / 10, L) - ep_uniform(i / 10, L)) for L in range(1, 21) for i in range(11)
    )
    report(3, worst < 1e-12, f"max |sum - closed form| = {worst:.2e} over L<=20")


def test_criterion_4_sparse_dominance():
    p_grid = [i / 10 for i in range(11)]
    bad = []
    for L in range(1, 11):
        for n_u in range(1, 2**L + 1):
            for p_cd in p_grid:
                s, u = ep_sparse(n_u, L, p_cd), ep_uniform(p_cd, L)
                if s < u - 1e-12 or (n_u < 2**L and p_cd > 0 and not s > u):
                    bad.append((L, n_u, p_cd))
    hand = ep_sparse(3, 2, 0.5)
    ok = not bad and math.isclose(hand, 2 / 3) and hand > 0.5625 == ep_uniform(0.5, 2)
    report(4, ok, f"{len(bad)} violations on the L<=10 grid; n_u=3, L=2, p_cd=0.5 gives {hand:.4f} > 0.5625")


def test_criterion_5_monte_carlo_vs_theory(robustness):
    by_point = {}
    for r in robustness:
        by_point.setdefault((r.x, r.p), []).append(r)
    misses = []
    for (x, p), rs in sorted(by_point.items()):
        bit_probs, survived = [], 0
        for r in rs:
            q = bit_survival_probability(r)
            for b, e in zip(r.watermark, r.extracted):
                if b == "1":
                    bit_probs.append(q)
                    survived += e == "1"
        lo, hi = acceptance_region(bit_probs)
        if not lo <= survived <= hi:
            misses.append(f"bits x={x} p={p}: {survived} not in [{lo},{hi}]")
        exact = sum(r.exact_match for r in rs)
        lo, hi = acceptance_region([exact_match_probability(r) for r in rs])
        if not lo <= exact <= hi:
            misses.append(f"exact x={x} p={p}: {exact} not in [{lo},{hi}]")
    detail = f"{2 * len(by_point)} checks at 99%, {len(misses)} outside"
    if misses:
        detail += ": " + "; ".join(misses)
    report(5, not misses, detail)


def test_criterion_6_transparency():
    pts = run_transparency(range(10, 101, 10), x=5)
    at50 = next(pt for pt in pts if pt.n_u == 50)
    ok = all(pt.below_bound for pt in pts) and at50.bound == 15
    worst = max(pt.measured_ni / pt.bound for pt in pts)
    report(6, ok, f"measured/bound at most {worst:.3f}; n_u=50 bound {at50.bound}, measured {at50.measured_ni:.2f}")


def test_criterion_7_scheme_comparison(comparison):
    aggs = {(a.scheme, a.p): a for a in aggregate(comparison)}
    problems = []
    for p in P_VALUES:
        s, b = aggs["spsw", p], aggs["baseline", p]
        sigma = math.hypot(mc_sigma(s.cr_exact, s.trials), mc_sigma(b.cr_exact, b.trials))
        if s.cr_exact < b.cr_exact - 2 * sigma:
            problems.append(f"p={p}: spsw {s.cr_exact:.2f} < baseline {b.cr_exact:.2f} - 2sigma")
        hits = round(b.cr_exact * b.trials)
        lo, hi = acceptance_region([b.predicted_exact] * b.trials)
        if not lo <= hits <= hi:
            problems.append(f"p={p}: baseline {hits} not in [{lo},{hi}] of (1-P/2)^L={b.predicted_exact:.3f}")
    summary = ", ".join(f"p={p}: {aggs['spsw', p].cr_exact:.2f}/{aggs['baseline', p].cr_exact:.2f}" for p in P_VALUES)
    report(7, not problems, f"spsw/baseline CR {summary}" + ("; " + "; ".join(problems) if problems else ""))


def _non_increasing(series, label):
    out = []
    for (k0, a), (k1, b) in zip(series, series[1:]):
        sigma = math.hypot(mc_sigma(a.cr_exact, a.trials), mc_sigma(b.cr_exact, b.trials))
        if b.cr_exact > a.cr_exact + 2 * sigma:
            out.append(f"{label} {k0}->{k1}: {a.cr_exact:.2f}->{b.cr_exact:.2f}")
    return out


def test_criterion_8_monotonicity(robustness, user_sweep):
    aggs = aggregate(robustness)
    problems = []
    for x in ROBUST_X:
        series = [(a.p, a) for a in aggs if a.x == x]
        problems += _non_increasing(series, f"x={x} p")
    for p in P_VALUES:
        # non-decreasing in x is non-increasing along descending x
        series = [(a.x, a) for a in sorted((a for a in aggs if a.p == p), key=lambda a: -a.x)]
        problems += _non_increasing(series, f"p={p} x")
    sweep = aggregate(user_sweep)
    for p in P_VALUES:
        series = [(a.n_u, a) for a in sorted((a for a in sweep if a.p == p), key=lambda a: a.n_u)]
        problems += _non_increasing(series, f"p={p} n_u")
    report(8, not problems, f"{len(problems)} trend violations beyond 2 sigma" + (": " + "; ".join(problems) if problems else ""))


def test_criterion_9_determinism(table, robustness, comparison, user_sweep):
    def grid(x_values, n_u_values):
        return ExperimentGrid(x_values=x_values, p_values=P_VALUES, n_u_values=n_u_values, trials=TRIALS, base_seed=BASE_SEED)

    again = {
        "robustness": run_robustness(table, grid(ROBUST_X, (50,)), key_column=KEY_COLUMN),
        "comparison": run_comparison(table, grid((5,), (50,)), key_column=KEY_COLUMN, workers=2),
        "users": run_robustness(table, grid((5,), N_U_SWEEP), key_column=KEY_COLUMN),
    }
    first = {"robustness": robustness, "comparison": comparison, "users": user_sweep}
    differing = [
        name
        for name in first
        if records_to_csv(first[name]) != records_to_csv(again[name])
        or aggregates_to_csv(aggregate(first[name])) != aggregates_to_csv(aggregate(again[name]))
    ]
    pts = run_transparency(range(10, 101, 10), x=5)
    if transparency_to_csv(pts) != transparency_to_csv(run_transparency(range(10, 101, 10), x=5)):
        differing.append("transparency")
    report(9, not differing, "record and aggregate CSVs byte-identical on rerun" if not differing else f"differs: {differing}")

"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case feeds identical inputs to both paths, checks the outputs agree,
and prints the best wall time of each plus the speedup. JIT compilation is
excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from fakemark import _kernels


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    keys = rng.random((200_000, 60))
    groups = rng.integers(0, 6, size=1_000_000).astype(np.int64)
    polarity = rng.integers(0, 2, size=1_000_000).astype(np.int64)
    yield (
        "containment_counts n=18",
        lambda: _kernels.containment_counts_numpy(18),
        lambda: _kernels._containment_counts_nb(18),
    )
    yield (
        "complete deletions 200k x 60, x=5, d=30",
        lambda: _kernels.count_complete_deletions_numpy(keys, 5, 30),
        lambda: _kernels._count_complete_deletions_nb(keys, 5, 30),
    )
    yield (
        "pair_counts 1M rows, L=6",
        lambda: _kernels.pair_counts_numpy(groups, polarity, 6),
        lambda: _kernels._pair_counts_nb(groups, polarity, 6),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.USING_NUMBA:
        raise SystemExit(f"numba path unavailable (unset {_kernels.DISABLE_ENV} or install numba)")
    print(f"{'case':42s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, slow, fast in cases():
        a, b = slow(), fast()
        if not np.array_equal(np.asarray(a), np.asarray(b)):
            raise SystemExit(f"{name}: paths disagree")
        t_np, t_nb = best_of(slow, args.repeat), best_of(fast, args.repeat)
        print(f"{name:42s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the pure-Python reference.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 0]

Both backends run on the same generated inputs; outputs are compared before
timings are reported.
"""

from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from posetdef._kernels import _py

try:
    from posetdef._kernels import _cy
except ImportError:  # extension not built
    _cy = None

from posetdef.generate import Stream, random_poset, trace_candidate


def _best(fn, repeat: int) -> tuple:
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(seed: int):
    s = Stream(seed, 0)
    for n, p in ((30, 0.1), (40, 0.07), (50, 0.06), (60, 0.05)):
        P = random_poset(s, n, p)
        incomp = [P.incomparable_mask(i) for i in range(n)]
        ones = sum(1 << i for i in range(n) if s.coin(0.5))
        yield f"bichromatic n={n}", "best_bichromatic_antichain", (n, incomp, ones)
        yield f"max antichains n={n}", "maximal_antichains", (n, incomp, P.full, ones, 3)
    for n, k in ((10, 2), (10, 3), (12, 4)):
        T, _ = trace_candidate("ideals", Stream(seed, n), n)
        tuples = np.array(list(itertools.permutations(range(T.B), k)), dtype=np.int64)
        yield f"tuple types B={T.B} k={k}", "tuple_type_masks", (T.R, tuples)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _cy is None:
        print("compiled backend not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'case':32} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for label, name, inputs in cases(args.seed):
        t_py, out_py = _best(lambda: getattr(_py, name)(*inputs), args.repeat)
        if _cy is None:
            print(f"{label:32} {t_py:10.4f} {'-':>10} {'-':>8}")
            continue
        t_cy, out_cy = _best(lambda: getattr(_cy, name)(*inputs), args.repeat)
        same = list(out_py) == list(out_cy) if name != "best_bichromatic_antichain" else tuple(out_py) == tuple(out_cy)
        if not same:
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:32} {t_py:10.4f} {t_cy:10.4f} {t_py / max(t_cy, 1e-9):7.1f}x")


if __name__ == "__main__":
    main()

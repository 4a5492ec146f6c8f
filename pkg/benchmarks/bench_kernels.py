"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--replicates N] [--repeat R]

Reports the best-of-R wall time for each kernel on each backend and checks
that both backends return identical results.
"""

import argparse
import sys
import timeit

import numpy as np

from gibbsdisc import PDParams, SampleSummary
from gibbsdisc import _kernels_py
from gibbsdisc._backend import BACKEND, kernels
from gibbsdisc.simulation import _ratio_tables


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=20_000)
    ap.add_argument("--triangle", type=int, default=400, help="Stirling triangle size")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if BACKEND != "compiled":
        print("compiled extension not available; nothing to compare", file=sys.stderr)
        return 1

    params = PDParams(0.5, 0.5)
    sample = SampleSummary.from_counts({1: 3, 2: 1})
    m = 10
    sizes = np.array(sample.multiplicities, dtype=np.int64)
    old, new = _ratio_tables(params, sample.n, sample.j, m)

    cases = {
        f"stirling_log_table(n={args.triangle})": lambda b: b.stirling_log_table(0.37, 5.3, args.triangle),
        f"urn_accumulate(m={m}, R={args.replicates})": lambda b: b.urn_accumulate(
            sizes, m, params.alpha, old, new, 7, 0, args.replicates, True),
    }
    print(f"{'kernel':<40} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, call in cases.items():
        fast_out, slow_out = call(kernels), call(_kernels_py)
        same = all(np.array_equal(np.asarray(a), np.asarray(b)) for a, b in
                   zip(fast_out if isinstance(fast_out, tuple) else (fast_out,),
                       slow_out if isinstance(slow_out, tuple) else (slow_out,)))
        t_fast = bench(lambda: call(kernels), args.repeat)
        t_slow = bench(lambda: call(_kernels_py), args.repeat)
        flag = "" if same else "  (OUTPUTS DIFFER)"
        print(f"{name:<40} {t_fast * 1e3:>10.2f}ms {t_slow * 1e3:>10.2f}ms {t_slow / t_fast:>8.1f}x{flag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py --n 256 --repeat 5
"""

import argparse

from pfreq.bench import format_table, run_benchmark

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=128, help="cells per side of the unit square")
    ap.add_argument("--p", type=float, default=4.0)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    print(format_table(run_benchmark(h=1.0 / a.n, p=a.p, repeat=a.repeat)))

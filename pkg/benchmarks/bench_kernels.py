"""Benchmark the numba sweep kernel against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [n_states]

Generates one deterministic Ginibre batch, runs both kernel
implementations on it (numba first warmed up so JIT compilation is not
timed), and reports throughput plus the maximum elementwise disagreement.
Run with HQC_DISABLE_NUMBA=1 to confirm the fallback is what the package
selects when numba is unavailable.
"""

import sys
import time

import numpy as np

from hqc.kernels import ACTIVE_KERNEL, sweep_stats_numba, sweep_stats_numpy
from hqc.states import SeededRng


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    gen = SeededRng(12345, 0).generator()
    ranks = gen.choice(np.arange(1, 5), size=n, p=[0.0, 1 / 3, 1 / 3, 1 / 3])
    g = gen.standard_normal((n, 4, 4)) + 1j * gen.standard_normal((n, 4, 4))
    g *= np.arange(4)[None, None, :] < ranks[:, None, None]
    print(f"batch: {n} states, active kernel: {ACTIVE_KERNEL}")

    t0 = time.perf_counter()
    out_np = sweep_stats_numpy(g)
    t_np = time.perf_counter() - t0
    print(f"numpy : {t_np:8.3f} s   {n / t_np:12.0f} states/s")

    if sweep_stats_numba is None:
        print("numba : unavailable (not installed or HQC_DISABLE_NUMBA set)")
        return 0

    sweep_stats_numba(g[:128])  # warm up JIT
    t0 = time.perf_counter()
    out_nb = sweep_stats_numba(g)
    t_nb = time.perf_counter() - t0
    print(f"numba : {t_nb:8.3f} s   {n / t_nb:12.0f} states/s   ({t_np / t_nb:.1f}x vs numpy)")

    worst = max(
        float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).max())
        for a, b in zip(out_np, out_nb)
    )
    print(f"max |numpy - numba| over all outputs: {worst:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

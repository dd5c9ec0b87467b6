"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot loop (sieve segment fill, cyclic progression sweep,
progression count) on realistic inputs with both backends and prints a
small table with the best wall time of each and the speedup.  The numba
functions are called once before timing so compilation cost is excluded.

Usage:

    python3 benchmarks/bench_kernels.py [--repeats 5] [--limit 10000000]
"""

import argparse
import math
import time

import numpy as np

from narrowlab import _kernels, numtheory as nt


def _best(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _row(name, numba_fn, numpy_fn, repeats):
    numba_fn()
    t_nb = _best(numba_fn, repeats)
    t_np = _best(numpy_fn, repeats)
    print(f"{name:<28} {t_nb * 1e3:>10.2f} {t_np * 1e3:>10.2f} "
          f"{t_np / t_nb:>8.2f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per case (best is reported)")
    parser.add_argument("--limit", type=int, default=10 ** 7,
                        help="sieve and flag array size")
    args = parser.parse_args(argv)

    limit = int(args.limit)
    sieve = nt.build_factor_sieve(limit)
    flags = sieve.prime_mask(limit - 1)

    seg_len = min(2 * 10 ** 6, limit // 2)
    lo = limit - seg_len
    base = np.flatnonzero(sieve.prime_mask(math.isqrt(limit))).astype(np.int64)
    base = base[base >= 2]
    seg = np.zeros(seg_len, dtype=np.uint32)

    nprime = 10 ** 5 + 3
    rng = np.random.default_rng(0)
    f = np.where(rng.random(nprime) < 0.08, math.log(nprime), 0.0)
    fs = np.vstack([f, f, f])
    D = 2000

    print(f"backend reported by package: {_kernels.backend()}")
    print(f"{'kernel':<28} {'numba ms':>10} {'numpy ms':>10} {'speedup':>9}")
    _row(
        f"spf_segment ({seg_len:,})",
        lambda: _kernels.spf_segment_numba(np.zeros_like(seg), lo, base),
        lambda: _kernels.spf_segment_numpy(np.zeros_like(seg), lo, base),
        args.repeats,
    )
    _row(
        f"lambda_sweep (N'={nprime:,}, D={D})",
        lambda: _kernels.lambda_sweep_numba(fs, D),
        lambda: _kernels.lambda_sweep_numpy(fs, D),
        args.repeats,
    )
    _row(
        f"ap_count ({limit:,}, k=3, d=6)",
        lambda: _kernels.ap_count_numba(flags, 3, 6),
        lambda: _kernels.ap_count_numpy(flags, 3, 6),
        args.repeats,
    )


if __name__ == "__main__":
    main()

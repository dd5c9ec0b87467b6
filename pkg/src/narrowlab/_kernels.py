"""Hot loops with numba implementations and pure-numpy fallbacks.

The numba path is used when the package is imported with numba available
and the environment variable ``NARROWLAB_NO_NUMBA`` unset (or set to a
falsy value).  Both paths compute identical results; the benchmark script
under ``benchmarks/`` compares their throughput.
"""

import os

import numpy as np

_flag = os.environ.get("NARROWLAB_NO_NUMBA", "").strip().lower()
_USE_NUMBA = _flag not in ("1", "true", "yes")

if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        _USE_NUMBA = False

if not _USE_NUMBA:
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


def backend():
    """Name of the active kernel backend, either "numba" or "numpy"."""
    return "numba" if _USE_NUMBA else "numpy"


# ---------------------------------------------------------------- spf fill

def spf_segment_numpy(spf_seg, lo, base_primes):
    """Mark smallest prime factors of [lo, lo+len) into a zeroed segment.

    Entries that remain 0 afterwards are primes (or below 2) relative to
    the base prime list, which must contain every prime up to
    sqrt(lo + len - 1).
    """
    hi = lo + spf_seg.shape[0]
    for p in base_primes:
        p = int(p)
        start = p * p
        if start < lo:
            start = ((lo + p - 1) // p) * p
        if start >= hi:
            continue
        view = spf_seg[start - lo::p]
        view[view == 0] = p


@njit(cache=True)
def _spf_segment_nb(spf_seg, lo, base_primes):
    hi = lo + spf_seg.shape[0]
    for idx in range(base_primes.shape[0]):
        p = base_primes[idx]
        start = p * p
        if start < lo:
            start = ((lo + p - 1) // p) * p
        for m in range(start, hi, p):
            if spf_seg[m - lo] == 0:
                spf_seg[m - lo] = p


def spf_segment_numba(spf_seg, lo, base_primes):
    """Numba twin of :func:`spf_segment_numpy`."""
    _spf_segment_nb(spf_seg, np.int64(lo), base_primes.astype(np.int64))


def spf_segment(spf_seg, lo, base_primes):
    if _USE_NUMBA:
        spf_segment_numba(spf_seg, lo, base_primes)
    else:
        spf_segment_numpy(spf_seg, lo, base_primes)


# ---------------------------------------------------- progression averages

def lambda_sweep_numpy(fs, D):
    """Mean over d in [1,D] and n of prod_j fs[j, n + j*d mod N]."""
    k, n = fs.shape
    doubled = [np.concatenate([fs[j], fs[j]]) for j in range(k)]
    total = 0.0
    for d in range(1, D + 1):
        v = fs[0].copy()
        for j in range(1, k):
            off = (j * d) % n
            v *= doubled[j][off:off + n]
        total += float(v.sum())
    return total / (n * D)


@njit(cache=True)
def _lambda_sweep3_nb(f1, f2, f3, D):
    n = f1.shape[0]
    total = 0.0
    for d in range(1, D + 1):
        s = 0.0
        i2 = d % n
        i3 = (2 * d) % n
        for i in range(n):
            v = f1[i]
            if v != 0.0:
                s += v * f2[i2] * f3[i3]
            i2 += 1
            if i2 == n:
                i2 = 0
            i3 += 1
            if i3 == n:
                i3 = 0
        total += s
    return total / (n * D)


@njit(cache=True)
def _lambda_sweep_nb(fs, D):
    k, n = fs.shape
    idx = np.empty(k, dtype=np.int64)
    total = 0.0
    for d in range(1, D + 1):
        for j in range(k):
            idx[j] = (j * d) % n
        s = 0.0
        for i in range(n):
            v = fs[0, i]
            if v != 0.0:
                for j in range(1, k):
                    v *= fs[j, idx[j]]
                s += v
            for j in range(1, k):
                idx[j] += 1
                if idx[j] == n:
                    idx[j] = 0
        total += s
    return total / (n * D)


def lambda_sweep_numba(fs, D):
    """Numba twin of :func:`lambda_sweep_numpy`."""
    fs = np.ascontiguousarray(fs, dtype=np.float64)
    if fs.shape[0] == 3:
        return float(_lambda_sweep3_nb(fs[0], fs[1], fs[2], D))
    return float(_lambda_sweep_nb(fs, D))


def lambda_sweep(fs, D):
    if _USE_NUMBA:
        return lambda_sweep_numba(fs, D)
    return lambda_sweep_numpy(fs, D)


# --------------------------------------------------------------- AP counts

def ap_count_numpy(flags, k, d):
    """Count n with flags[n + j*d] set for all j in [0, k), no wraparound."""
    n = flags.shape[0]
    top = n - (k - 1) * d
    if top <= 0:
        return 0
    v = flags[:top].copy()
    for j in range(1, k):
        v &= flags[j * d:j * d + top]
    return int(np.count_nonzero(v))


@njit(cache=True)
def _ap_count_nb(flags, k, d):
    n = flags.shape[0]
    top = n - (k - 1) * d
    c = 0
    for i in range(top):
        ok = True
        for j in range(k):
            if not flags[i + j * d]:
                ok = False
                break
        if ok:
            c += 1
    return c


def ap_count_numba(flags, k, d):
    """Numba twin of :func:`ap_count_numpy`."""
    return int(_ap_count_nb(flags, np.int64(k), np.int64(d)))


def ap_count(flags, k, d):
    if _USE_NUMBA:
        return ap_count_numba(flags, k, d)
    return ap_count_numpy(flags, k, d)

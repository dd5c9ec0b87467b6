import os
import subprocess
import sys

import numpy as np
import pytest

from narrowlab import _kernels as kr


def test_backend_reports_numba_here():
    assert kr.backend() in ("numba", "numpy")
    if os.environ.get("NARROWLAB_NO_NUMBA", "").strip().lower() in ("", "0"):
        assert kr.backend() == "numba"


def _base_primes(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.uint32)


def test_spf_segment_paths_agree():
    base = _base_primes(100)
    for lo, size in ((2, 120), (5000, 333), (9001, 1000)):
        seg_np = np.zeros(size, dtype=np.uint32)
        seg_nb = np.zeros(size, dtype=np.uint32)
        kr.spf_segment_numpy(seg_np, lo, base)
        kr.spf_segment_numba(seg_nb, lo, base)
        assert np.array_equal(seg_np, seg_nb), (lo, size)


def test_lambda_sweep_paths_agree():
    rng = np.random.default_rng(1)
    for k in (2, 3, 4):
        fs = np.vstack([rng.random(211) for _ in range(k)])
        for D in (1, 7, 50):
            a = kr.lambda_sweep_numpy(fs, D)
            b = kr.lambda_sweep_numba(fs, D)
            assert a == pytest.approx(b, rel=1e-12), (k, D)


def test_ap_count_paths_agree():
    rng = np.random.default_rng(2)
    flags = rng.random(5000) < 0.2
    for k in (2, 3, 4):
        for d in (1, 6, 30):
            a = kr.ap_count_numpy(flags, k, d)
            b = kr.ap_count_numba(flags, k, d)
            assert a == b, (k, d)


def test_ap_count_matches_direct_enumeration():
    rng = np.random.default_rng(3)
    flags = rng.random(400) < 0.3
    k, d = 3, 7
    want = sum(
        1
        for start in range(len(flags) - (k - 1) * d)
        if all(flags[start + j * d] for j in range(k))
    )
    assert kr.ap_count(flags, k, d) == want


def test_numpy_fallback_selected_by_env_flag():
    code = (
        "from narrowlab import _kernels\n"
        "print(_kernels.backend())\n"
    )
    env = dict(os.environ, NARROWLAB_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "numpy"

"""Narrow arithmetic progressions in the primes.

Counts k-term progressions with a fixed common difference, compares them
against the singular-series prediction, searches for the narrowest
progressions inside congruence-filtered prime subsets, and evaluates the
restricted-difference counting average Lambda_D used to certify that
narrow progressions exist at a given scale.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .singular import DEFAULT_PMAX, as_shift, singular_series

MEDIAN_TARGET = 512


def lambda_D(f_list, D):
    """Mean over n in Z/N'Z and d in [1, D] of prod_j f_j(n + j*d).

    Indices reduce cyclically mod N'.  All arrays must share one length.
    """
    fs = [np.asarray(f, dtype=np.float64) for f in f_list]
    if not fs:
        raise DomainError("need at least one array")
    n = fs[0].shape[0]
    for f in fs:
        if f.ndim != 1 or f.shape[0] != n:
            raise DomainError(
                f"arrays must share one length, got {f.shape} vs {n}"
            )
    D = int(D)
    if not 1 <= D < n:
        raise DomainError(f"need 1 <= D < N', got D={D}, N'={n}")
    return float(_kernels.lambda_sweep(np.vstack(fs), D))


def prime_signal(sieve, nprime):
    """The normalized prime indicator log N' on primes in [sqrt(N'), N').

    Its mean is close to 1 by the prime number theorem, which makes
    lambda_D values directly comparable to 1.
    """
    nprime = int(nprime)
    if nprime > sieve.limit:
        raise DomainError(
            f"modulus {nprime} exceeds sieve limit {sieve.limit}"
        )
    if not sieve.is_prime(nprime):
        raise DomainError(f"modulus {nprime} must be prime")
    mask = sieve.prime_mask(nprime - 1)
    lo = math.isqrt(nprime - 1) + 1
    f = np.zeros(nprime, dtype=np.float64)
    f[: mask.shape[0]][mask] = math.log(nprime)
    f[:lo] = 0.0
    return f


def count_aps_with_difference(N, k, d, sieve):
    """Number of primes p <= N with p, p+d, ..., p+(k-1)d all prime."""
    N, k, d = int(N), int(k), int(d)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    top = N + (k - 1) * d
    if top > sieve.limit:
        raise DomainError(
            f"need sieve limit >= {top}, have {sieve.limit}"
        )
    mask = sieve.prime_mask(top)
    return int(_kernels.ap_count(mask[: N + (k - 1) * d + 1], k, d))


@dataclass(frozen=True)
class HLPrediction:
    """Prediction for the number of k-APs of primes up to N with gap d.

    ``value`` integrates the prime density, G * int_2^N dt / (log t)^k,
    which is what matches counts at reachable scales.  ``crude`` is the
    leading-order form G * N / (log N)^k; the two agree asymptotically but
    the crude form lags by tens of percent in the desk range.
    """

    value: float
    crude: float
    singular_value: float
    N: int
    k: int
    d: int


def _log_integral(N, k, npanels=400):
    """int_2^N dt / (log t)^k by Gauss-Legendre in u = log t."""
    nodes, weights = np.polynomial.legendre.leggauss(10)
    a, b = math.log(2.0), math.log(float(N))
    edges = np.linspace(a, b, npanels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    u = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.exp(u) / u ** k
    return float((vals @ weights * half).sum())


def hl_prediction(N, k, d, P_max=DEFAULT_PMAX):
    """Singular-series prediction for count_aps_with_difference(N, k, d)."""
    N, k, d = int(N), int(k), int(d)
    if N < 3:
        raise DomainError(f"N must be >= 3, got {N}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    shifts = as_shift(tuple(i * d for i in range(k)))
    sing = singular_series(shifts, P_max=P_max)
    g = sing.value
    crude = g * N / math.log(N) ** k
    value = g * _log_integral(N, k) if g != 0.0 else 0.0
    return HLPrediction(value=value, crude=crude, singular_value=g,
                        N=N, k=k, d=d)


@dataclass(frozen=True)
class APCountReport:
    """Exact AP count next to its prediction."""

    N: int
    k: int
    d: int
    count: int
    prediction: float
    ratio: float


def ap_count_report(N, k, d, sieve, P_max=DEFAULT_PMAX):
    """Count APs and compare with hl_prediction in one report."""
    count = count_aps_with_difference(N, k, d, sieve)
    pred = hl_prediction(N, k, d, P_max=P_max)
    ratio = count / pred.value if pred.value > 0 else math.inf
    return APCountReport(N=int(N), k=int(k), d=int(d), count=count,
                         prediction=pred.value, ratio=ratio)


@dataclass(frozen=True)
class SubsetRule:
    """Keep primes lying in fixed residue classes modulo m."""

    modulus: int
    classes: tuple

    def __post_init__(self):
        m = int(self.modulus)
        if m < 1:
            raise DomainError(f"modulus must be >= 1, got {m}")
        cls = tuple(sorted({int(c) % m for c in self.classes}))
        if not cls:
            raise DomainError("subset rule needs at least one class")
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "classes", cls)

    @property
    def prime_density(self):
        """Asymptotic density of the kept primes among all primes."""
        m = self.modulus
        units = sum(1 for c in self.classes if math.gcd(c, m) == 1)
        phi = sum(1 for a in range(1, m + 1) if math.gcd(a, m) == 1)
        return units / phi

    def mask(self, upto):
        residues = np.arange(int(upto) + 1, dtype=np.int64) % self.modulus
        keep = np.zeros(self.modulus, dtype=bool)
        for c in self.classes:
            keep[c] = True
        return keep[residues]


@dataclass(frozen=True)
class NarrownessRow:
    """Narrowest and typical common differences at one scale N."""

    N: int
    min_d: int
    median_d: float
    log_pow_low: float
    log_pow_high: float
    ratio_low: float
    ratio_high: float


@dataclass(frozen=True)
class NarrownessReport:
    """Ladder of narrowness measurements for a prime subset."""

    k: int
    delta: float
    rows: tuple


def narrowness_report(ladder, k, delta, rule, sieve):
    """Minimal and median common difference of k-APs in a prime subset.

    For each N in the ladder, scans differences d = 1, 2, ... for
    progressions p, p+d, ..., p+(k-1)d with p <= N whose members are all
    primes kept by the rule (all primes when the rule is None).  The scan
    stops once enough progressions are collected for a median or d passes
    the reference width (log N)^L with L = (k-1) 2^(k-2), whichever is
    later than the first hit.  Rows compare min_d against (log N)^(k-1)
    and (log N)^L.
    """
    k = int(k)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    delta = float(delta)
    ladder = [int(N) for N in ladder]
    if not ladder:
        raise DomainError("ladder must be non-empty")
    L = (k - 1) * 2 ** (k - 2)
    rows = []
    for N in ladder:
        logn = math.log(N)
        cap = max(2, math.ceil(logn ** L))
        top = N + (k - 1) * cap
        if top > sieve.limit:
            raise DomainError(
                f"need sieve limit >= {top} for N={N}, have {sieve.limit}"
            )
        mask = sieve.prime_mask(top)
        if rule is not None:
            if rule.prime_density < delta:
                raise DomainError(
                    f"rule density {rule.prime_density:.4f} below "
                    f"requested {delta}"
                )
            mask = mask & rule.mask(top)
        if not mask[: N + 1].any():
            raise DomainError(f"prime subset empty below N={N}")
        min_d = 0
        diffs = []
        for d in range(1, cap + 1):
            c = int(_kernels.ap_count(mask[: N + (k - 1) * d + 1], k, d))
            if c > 0:
                if min_d == 0:
                    min_d = d
                diffs.extend([d] * c)
                if len(diffs) >= MEDIAN_TARGET:
                    break
        if min_d == 0:
            raise DomainError(
                f"no {k}-AP with d <= {cap} in the subset at N={N}"
            )
        median_d = float(np.median(diffs))
        low = logn ** (k - 1)
        high = logn ** L
        rows.append(NarrownessRow(
            N=N, min_d=min_d, median_d=median_d,
            log_pow_low=low, log_pow_high=high,
            ratio_low=min_d / low, ratio_high=min_d / high,
        ))
    return NarrownessReport(k=k, delta=delta, rows=tuple(rows))

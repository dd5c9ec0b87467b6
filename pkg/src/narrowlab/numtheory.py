"""Integer arithmetic foundations: sieves, multiplicative functions, W-trick contexts."""

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, FormatError, ResourceError

SIEVE_MAGIC = b"NAPSV1"
DEFAULT_SEGMENT = 1 << 26

# Witness set proving primality for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin primality test for n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FactorSieve:
    """Smallest-prime-factor table for 2 <= n <= limit.

    spf[n] is the smallest prime factor of n, so spf[p] = p exactly when
    p is prime.  Entries 0 and 1 are sentinels (0 and 1 respectively).
    The table is immutable after construction and safe to share.
    """

    def __init__(self, limit, spf):
        self.limit = int(limit)
        self.spf = spf
        self._prime_cache = None

    def __repr__(self):
        return f"FactorSieve(limit={self.limit})"

    def check_range(self, n):
        n = int(n)
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside sieve range [1, {self.limit}]")
        return n

    def is_prime(self, n):
        n = self.check_range(n)
        return n >= 2 and int(self.spf[n]) == n

    def prime_mask(self, upto=None):
        """Boolean array m with m[n] true exactly when n is prime, n <= upto."""
        upto = self.limit if upto is None else int(upto)
        if not 2 <= upto <= self.limit:
            raise DomainError(f"upto={upto} outside sieve range [2, {self.limit}]")
        idx = np.arange(upto + 1, dtype=np.int64)
        mask = self.spf[:upto + 1].astype(np.int64) == idx
        mask[:2] = False
        return mask

    def primes(self, upto=None):
        """Array of primes up to the given bound (default: the sieve limit)."""
        if upto is None and self._prime_cache is not None:
            return self._prime_cache
        mask = self.prime_mask(upto)
        out = np.nonzero(mask)[0]
        if upto is None:
            self._prime_cache = out
        return out

    def save(self, path):
        save_sieve(self, path)

    @classmethod
    def load(cls, path):
        return load_sieve(path)


def build_factor_sieve(limit, segment_size=DEFAULT_SEGMENT):
    """Build a FactorSieve via segmented smallest-prime-factor marking.

    Segments of at most segment_size entries are filled in turn, so the
    working set beyond the table itself stays bounded.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit >= 1 << 32:
        raise ResourceError(
            f"sieve limit {limit} exceeds the uint32 factor table range"
        )
    segment_size = max(int(segment_size), 1 << 10)
    try:
        spf = np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError:
        raise ResourceError(
            f"cannot allocate sieve of {limit + 1} entries "
            f"(~{4 * (limit + 1)} bytes required)"
        ) from None
    root = math.isqrt(limit)
    base_primes = _bootstrap_primes(root)
    lo = 2
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        _kernels.spf_segment(spf[lo:hi], lo, base_primes)
        lo = hi
    unmarked = np.nonzero(spf == 0)[0]
    spf[unmarked] = unmarked
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return FactorSieve(limit, spf)


def _bootstrap_primes(upto):
    """Primes up to upto via a plain boolean sieve (small bound)."""
    if upto < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(upto + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(upto) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def factorize(n, sieve):
    """Sorted list of (prime, exponent) pairs with product n; empty for n=1."""
    n = sieve.check_range(n)
    out = []
    while n > 1:
        p = int(sieve.spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def moebius(n, sieve):
    """Moebius function mu(n)."""
    n = sieve.check_range(n)
    sign = 1
    while n > 1:
        p = int(sieve.spf[n])
        n //= p
        if n % p == 0:
            return 0
        sign = -sign
    return sign


def euler_phi(n, sieve):
    """Euler totient phi(n)."""
    n = sieve.check_range(n)
    result = n
    while n > 1:
        p = int(sieve.spf[n])
        result -= result // p
        while n % p == 0:
            n //= p
    return result


def omega(q, sieve):
    """Number of distinct prime factors of q; omega(1) = 0."""
    return len(factorize(q, sieve))


@dataclass(frozen=True)
class WTrickContext:
    """Primorial modulus data: W = prod of primes <= w, residue b coprime to W,
    and a prime modulus N' defining the cyclic group Z/N'Z."""

    w: int
    W: int
    b: int
    modulus: int

    @property
    def phi_W(self):
        phi = 1
        for p in _bootstrap_primes(self.w):
            phi *= int(p) - 1
        return max(phi, 1)


def primorial(w):
    """Product of the primes up to w."""
    out = 1
    for p in _bootstrap_primes(int(w)):
        out *= int(p)
    return out


def primorial_context(w, b, modulus):
    """Validated WTrickContext with b reduced mod W and modulus checked prime."""
    w = int(w)
    b = int(b)
    modulus = int(modulus)
    if w < 1:
        raise DomainError(f"w must be >= 1, got {w}")
    W = primorial(w)
    b %= W
    for p in _bootstrap_primes(w):
        if b % int(p) == 0:
            raise DomainError(
                f"residue b={b} shares the prime factor {int(p)} with W={W}"
            )
    if not is_prime(modulus):
        raise DomainError(f"modulus {modulus} is not prime")
    return WTrickContext(w=w, W=W, b=b, modulus=modulus)


# ------------------------------------------------------------- cache files

def cache_dir():
    """Directory for binary caches, from NARROWLAB_CACHE_DIR (default cwd)."""
    return os.environ.get("NARROWLAB_CACHE_DIR", ".")


def save_sieve(sieve, path):
    """Write the NAPSV1 binary sieve format: magic, u64 LE limit, u32 spf."""
    with open(path, "wb") as fh:
        fh.write(SIEVE_MAGIC)
        fh.write(int(sieve.limit).to_bytes(8, "little"))
        fh.write(np.ascontiguousarray(sieve.spf, dtype="<u4").tobytes())


def load_sieve(path):
    """Load a NAPSV1 sieve file, validating magic and length."""
    with open(path, "rb") as fh:
        magic = fh.read(6)
        if magic != SIEVE_MAGIC:
            raise FormatError(
                f"bad sieve magic {magic!r}, expected {SIEVE_MAGIC.decode()}"
            )
        raw_limit = fh.read(8)
        if len(raw_limit) != 8:
            raise FormatError("truncated sieve header")
        limit = int.from_bytes(raw_limit, "little")
        data = fh.read()
    expected = 4 * (limit + 1)
    if len(data) != expected:
        raise FormatError(
            f"sieve payload has {len(data)} bytes, expected {expected}"
        )
    spf = np.frombuffer(data, dtype="<u4").astype(np.uint32)
    return FactorSieve(limit, spf)

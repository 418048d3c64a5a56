"""Prime tables, Chebyshev functions and primorial sizes.

A :class:`PrimeTable` is built once per limit and shared read-only by every
scan. Log-sums are accumulated in extended precision (``np.longdouble``).
"""
from dataclasses import dataclass, field
import math
import os
from pathlib import Path
import struct
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, RangeError, ResourceError

DEFAULT_MAX_LIMIT = 500_000_000
CACHE_ENV = "ABUNDANCY_CACHE_DIR"
CACHE_MAGIC = b"ABL1"


@dataclass(frozen=True, eq=False)
class PrimeTable:
    limit: int
    primes: np.ndarray  # int64, strictly increasing, read-only
    cum_log: np.ndarray  # longdouble, cum_log[k] = log(p_0 * ... * p_k)
    _derived: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.primes)

    def count_upto(self, x):
        """pi(x) for 0 <= x <= limit."""
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))

    def derived(self, key, build):
        """Memoise an array computed from the primes (e.g. a cumulative sum)."""
        if key not in self._derived:
            arr = build(self.primes)
            arr.setflags(write=False)
            self._derived[key] = arr
        return self._derived[key]

    def __eq__(self, other):
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return (self.limit == other.limit
                and np.array_equal(self.primes, other.primes)
                and np.array_equal(self.cum_log, other.cum_log))


def sieve_primes(limit):
    """All primes <= limit as an int64 array (odd-only Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i stands for 2*i + 1
    size = (limit - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    primes = 2 * np.nonzero(odd)[0].astype(np.int64) + 1
    return np.concatenate(([2], primes)).astype(np.int64)


def _make_table(limit, primes):
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    cum_log = np.cumsum(np.log(primes.astype(np.longdouble)))
    primes.setflags(write=False)
    cum_log.setflags(write=False)
    return PrimeTable(limit=int(limit), primes=primes, cum_log=cum_log)


def build_table(limit, max_limit=DEFAULT_MAX_LIMIT, cache_dir=None):
    """Sieve the primes up to ``limit``.

    ``cache_dir`` defaults to ``$ABUNDANCY_CACHE_DIR``; without either the
    table is always sieved afresh.
    """
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"build_table needs limit >= 2, got {limit}")
    if limit > max_limit:
        raise ResourceError(f"limit {limit} exceeds memory budget {max_limit}")
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV) or None
    path = Path(cache_dir) / f"primes_{limit}.abl" if cache_dir else None
    if path is not None and path.exists():
        cached_limit, primes = read_cache(path)
        if cached_limit == limit:
            return _make_table(limit, primes)
    primes = sieve_primes(limit)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_cache(path, limit, primes)
    return _make_table(limit, primes)


# -- on-disk cache ---------------------------------------------------------

def _encode_varints(values):
    out = bytearray()
    for v in values:
        v = int(v)
        while v >= 0x80:
            out.append((v & 0x7F) | 0x80)
            v >>= 7
        out.append(v)
    return bytes(out)


def _decode_varints(buf, count):
    values = np.empty(count, dtype=np.int64)
    pos = 0
    for i in range(count):
        shift = v = 0
        while True:
            b = buf[pos]
            pos += 1
            v |= (b & 0x7F) << shift
            if b < 0x80:
                break
            shift += 7
        values[i] = v
    if pos != len(buf):
        raise ValueError("trailing bytes in prime cache")
    return values


def write_cache(path, limit, primes):
    deltas = np.diff(np.asarray(primes, dtype=np.int64), prepend=0)
    header = CACHE_MAGIC + struct.pack("<QQ", limit, len(primes))
    Path(path).write_bytes(header + _encode_varints(deltas))


def read_cache(path):
    data = Path(path).read_bytes()
    if data[:4] != CACHE_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    limit, count = struct.unpack("<QQ", data[4:20])
    primes = np.cumsum(_decode_varints(data[20:], count))
    return limit, primes


# -- queries ---------------------------------------------------------------

class NthPrime(NamedTuple):
    value: int
    cipolla_holds: Optional[bool]  # n log n <= p_n <= n(log n + log log n)
    minus_one_holds: Optional[bool]  # same with the upper form n(log n + log log n - 1)


def nth_prime(table, n):
    if n < 1 or n > len(table):
        raise RangeError(f"p_{n} is not in a table of {len(table)} primes")
    p = int(table.primes[n - 1])
    if n == 1:
        return NthPrime(p, None, None)
    ln = math.log(n)
    lln = math.log(ln)
    lower = n * ln <= p
    return NthPrime(p, lower and p <= n * (ln + lln),
                    lower and p <= n * (ln + lln - 1))


def theta(table, x):
    if x < 0 or x > table.limit:
        raise RangeError(f"x={x} outside [0, {table.limit}]")
    k = table.count_upto(x)
    return float(table.cum_log[k - 1]) if k else 0.0


def psi(table, x):
    if x < 0 or x > table.limit:
        raise RangeError(f"x={x} outside [0, {table.limit}]")
    X = math.floor(x)
    extra = []
    for p in table.primes[:table.count_upto(math.isqrt(X))] if X >= 4 else ():
        p = int(p)
        power, alpha = p * p, 1
        while power <= X:
            power *= p
            alpha += 1
        extra.append((alpha - 1) * math.log(p))
    return math.fsum([theta(table, X)] + extra)


def chebyshev(table, x, kind="theta"):
    if kind == "theta":
        return theta(table, x)
    if kind == "psi":
        return psi(table, x)
    raise ValueError(f"unknown Chebyshev kind {kind!r}")


def log_primorial(table, k):
    """log(p_1 * ... * p_k), i.e. theta(p_k)."""
    if k < 1 or k > len(table):
        raise RangeError(f"k={k} outside [1, {len(table)}]")
    return float(table.cum_log[k - 1])


def theta_residuals(table, xs):
    """x - theta(x) at each x; raw data for fitting a log-power decay rate."""
    xs = np.asarray(xs, dtype=float)
    idx = np.searchsorted(table.primes, np.floor(xs), side="right")
    th = np.where(idx > 0, table.cum_log[np.maximum(idx - 1, 0)].astype(float), 0.0)
    return xs - th


def fit_log_power(xs, residuals):
    """Fit |x - theta(x)| ~ C x / log^A x by least squares in log space.

    Returns (A, C). Points with a zero residual are dropped.
    """
    xs = np.asarray(xs, dtype=float)
    r = np.abs(np.asarray(residuals, dtype=float))
    keep = (r > 0) & (xs > math.e)
    y = np.log(r[keep] / xs[keep])
    X = np.column_stack([np.ones(keep.sum()), -np.log(np.log(xs[keep]))])
    (logc, a), *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(a), float(math.exp(logc))

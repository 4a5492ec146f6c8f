"""Rising factorials, Stirling triangles, binomials and Beta-Binomial masses.

Everything is returned as :class:`~gibbsdisc.logspace.LogNumber` (or as
arrays of natural logs for the vectorised helpers) so that products such
as ``(theta + n)_{m+1}`` never overflow a double.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .logspace import LogNumber

__all__ = [
    "rising_factorial",
    "gen_rising_factorial",
    "log_rising_prefix",
    "binomial",
    "log_binomial",
    "beta_binomial_pmf",
    "StirlingTriangle",
    "build_stirling_triangle",
    "TriangleCache",
    "log_connection_sum",
]


def _product(factors) -> LogNumber:
    sign = 1
    logs = []
    for f in factors:
        if f == 0:
            return LogNumber.zero()
        if f < 0:
            sign = -sign
        logs.append(math.log(abs(f)))
    total = math.fsum(logs)
    return LogNumber(sign, total, math.fsum(logs + [-total]))


def rising_factorial(x: float, n: int) -> LogNumber:
    """``(x)_n = x (x+1) ... (x+n-1)``; the empty product is one."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return _product(x + i for i in range(n))


def gen_rising_factorial(x: float, n: int, step: float) -> LogNumber:
    """``(x)_{n, step} = x (x+step) ... (x+(n-1) step)``."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return _product(x + i * step for i in range(n))


def _compensated_cumsum(values) -> np.ndarray:
    # Neumaier summation; prefix sums of a few hundred logs stay at ~1 ulp.
    out = np.empty(len(values) + 1)
    out[0] = 0.0
    s = 0.0
    c = 0.0
    for i, v in enumerate(values):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i + 1] = s + c
    return out


def log_rising_prefix(x: float, n: int, step: float = 1.0) -> np.ndarray:
    """Array ``L`` with ``L[t] = log (x)_{t, step}`` for ``t = 0..n``.

    All factors must be positive.
    """
    factors = [x + i * step for i in range(n)]
    if factors and min(factors) <= 0:
        raise ValueError(f"nonpositive factor in ({x})_{{{n}, {step}}}")
    return _compensated_cumsum([math.log(f) for f in factors])


def log_binomial(m: int, k: int) -> float:
    if k < 0 or k > m:
        return -math.inf
    return math.log(math.comb(m, k))


def binomial(m: int, k: int) -> LogNumber:
    """``C(m, k)``, zero outside ``0 <= k <= m``."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if k < 0 or k > m:
        return LogNumber.zero()
    c = math.comb(m, k)
    if c.bit_length() < 1000:
        return LogNumber.from_float(float(c))  # correctly rounded
    return LogNumber.from_log(math.log(c))


def beta_binomial_pmf(m: int, k: int, a: float, b: float) -> LogNumber:
    """Beta-Binomial(m, a, b) mass at ``k``: ``C(m,k) (a)_k (b)_{m-k} / (a+b)_m``."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if not (a > 0 and b > 0):
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if k < 0 or k > m:
        return LogNumber.zero()
    return binomial(m, k) * rising_factorial(a, k) * rising_factorial(b, m - k) / rising_factorial(a + b, m)


@dataclass(frozen=True)
class StirlingTriangle:
    """Non-central generalised Stirling numbers ``T(n, xi)`` for fixed ``(alpha, gamma)``.

    Defined as the connection coefficients

        (x + gamma)_n = sum_xi T(n, xi) (x)_{xi, alpha}

    and stored as natural logs (``-inf`` marks an exact zero).  All entries
    are nonnegative when ``gamma >= 0``.
    """

    alpha: float
    gamma: float
    max_n: int
    log_entries: np.ndarray = field(repr=False)

    def entry(self, n: int, xi: int) -> LogNumber:
        if not 0 <= n <= self.max_n:
            raise IndexError(f"n={n} outside triangle of size {self.max_n}")
        if xi < 0 or xi > n:
            return LogNumber.zero()
        return LogNumber(1, float(self.log_entries[n, xi]))

    def value(self, n: int, xi: int) -> float:
        return float(self.entry(n, xi))

    def log_row(self, n: int) -> np.ndarray:
        return self.log_entries[n, : n + 1]

    def expand(self, n: int, x: float) -> float:
        """Evaluate ``sum_xi T(n, xi) (x)_{xi, alpha}`` (for checking the defining identity)."""
        return float(sum(float(self.entry(n, xi)) * float(gen_rising_factorial(x, xi, self.alpha))
                         for xi in range(n + 1)))


def build_stirling_triangle(alpha: float, gamma: float, max_n: int) -> StirlingTriangle:
    """Fill the triangle through ``T(n+1, xi) = T(n, xi-1) + (gamma + n - xi alpha) T(n, xi)``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0 for the log-space triangle, got {gamma}")
    if max_n < 0:
        raise ValueError(f"max_n must be nonnegative, got {max_n}")
    table = np.asarray(kernels.stirling_log_table(float(alpha), float(gamma), int(max_n)))
    table.setflags(write=False)
    return StirlingTriangle(float(alpha), float(gamma), int(max_n), table)


class TriangleCache:
    """Triangles keyed by ``(alpha, gamma)``, grown on demand.

    Lookups are lock-free reads of an immutable triangle; inserts take a lock.
    A larger triangle answers every smaller request since rows never change.
    """

    def __init__(self):
        self._tables: dict[tuple[float, float], StirlingTriangle] = {}
        self._lock = threading.Lock()

    def get(self, alpha: float, gamma: float, max_n: int) -> StirlingTriangle:
        key = (float(alpha), float(gamma))
        tri = self._tables.get(key)
        if tri is not None and tri.max_n >= max_n:
            return tri
        with self._lock:
            tri = self._tables.get(key)
            if tri is None or tri.max_n < max_n:
                tri = build_stirling_triangle(alpha, gamma, max_n)
                self._tables[key] = tri
            return tri

    def __len__(self):
        return len(self._tables)


def log_connection_sum(log_coeffs: np.ndarray, tri: StirlingTriangle, rows) -> np.ndarray:
    """``log sum_xi exp(log_coeffs[xi]) T(row, xi)`` for each requested row.

    ``log_coeffs`` must cover ``xi = 0..max(rows)``.
    """
    rows = np.asarray(rows, dtype=int)
    if rows.size == 0:
        return np.empty(0)
    width = int(rows.max()) + 1
    block = tri.log_entries[rows, :width] + np.asarray(log_coeffs[:width])[None, :]
    top = block.max(axis=1)
    finite = top > -np.inf
    out = np.full(rows.shape, -np.inf)
    if finite.any():
        shifted = np.exp(block[finite] - top[finite][:, None])
        out[finite] = top[finite] + np.log(shifted.sum(axis=1))
    return out


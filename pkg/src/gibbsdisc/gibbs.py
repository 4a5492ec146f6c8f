"""Observed samples, Gibbs-type priors and their partition probabilities."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .logspace import LogNumber
from .special import gen_rising_factorial, log_rising_prefix, rising_factorial

__all__ = [
    "SampleSummary",
    "GibbsModel",
    "PDParams",
    "TableGibbsModel",
    "pd_weight",
    "eppf",
    "eppf_counts",
    "backward_recursion_error",
]


@dataclass(frozen=True)
class SampleSummary:
    """Frequency-of-frequencies summary of a basic sample.

    ``counts`` maps a species size ``k`` to ``c_k``, the number of species
    observed exactly ``k`` times.  Only nonzero counts are stored.
    """

    counts: tuple[tuple[int, int], ...]
    n: int = field(init=False)
    j: int = field(init=False)

    def __post_init__(self):
        clean = {}
        for size, c in self.counts:
            size, c = int(size), int(c)
            if size <= 0:
                raise ValueError(f"species sizes must be positive, got {size}")
            if c < 0:
                raise ValueError(f"counts must be nonnegative, got {c} for size {size}")
            if c:
                clean[size] = clean.get(size, 0) + c
        if not clean:
            raise ValueError("sample must contain at least one species")
        object.__setattr__(self, "counts", tuple(sorted(clean.items())))
        object.__setattr__(self, "n", sum(k * c for k, c in clean.items()))
        object.__setattr__(self, "j", sum(clean.values()))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int] | Iterable[tuple[int, int]]) -> "SampleSummary":
        items = counts.items() if isinstance(counts, Mapping) else counts
        return cls(tuple(items))

    @classmethod
    def from_count_vector(cls, vector: Iterable[int]) -> "SampleSummary":
        """From ``(c_1, c_2, ...)``."""
        return cls(tuple((k, c) for k, c in enumerate(vector, start=1)))

    @classmethod
    def from_multiplicities(cls, multiplicities: Iterable[int]) -> "SampleSummary":
        mult = [int(x) for x in multiplicities]
        if any(x <= 0 for x in mult):
            raise ValueError("multiplicities must be positive")
        return cls(tuple(Counter(mult).items()))

    def c(self, k: int) -> int:
        return dict(self.counts).get(k, 0)

    @property
    def count_map(self) -> dict[int, int]:
        return dict(self.counts)

    @property
    def count_vector(self) -> list[int]:
        """Dense ``[c_1, ..., c_n]``."""
        d = dict(self.counts)
        return [d.get(k, 0) for k in range(1, self.n + 1)]

    @property
    def multiplicities(self) -> list[int]:
        return [k for k, c in reversed(self.counts) for _ in range(c)]

    @property
    def sizes(self) -> list[int]:
        """Distinct observed species sizes, ascending."""
        return [k for k, _ in self.counts]


class GibbsModel(ABC):
    """A Gibbs-type prior: discount ``alpha`` plus weights ``V(n, j)``."""

    alpha: float

    @abstractmethod
    def log_weight(self, n: int, j: int) -> float:
        """Natural log of ``V(n, j)``."""

    def weight(self, n: int, j: int) -> LogNumber:
        return LogNumber.from_log(self.log_weight(n, j))

    def log_weight_ratios(self, n0: int, j0: int, n1: int, js) -> np.ndarray:
        """``log V(n1, js) - log V(n0, j0)`` for an array of ``js``."""
        base = self.log_weight(n0, j0)
        return np.array([self.log_weight(n1, int(j)) - base for j in js])

    def log_weight_ratio(self, n0: int, j0: int, n1: int, j1: int) -> float:
        return float(self.log_weight_ratios(n0, j0, n1, [j1])[0])

    def describe(self) -> str:
        return f"{type(self).__name__}(alpha={self.alpha!r})"


def _check_nj(n: int, j: int) -> None:
    if n < 1 or j < 1 or j > n:
        raise ValueError(f"need 1 <= j <= n, got n={n}, j={j}")


@dataclass(frozen=True)
class PDParams(GibbsModel):
    """Two-parameter Poisson-Dirichlet prior, ``alpha in (0,1)``, ``theta > -alpha``."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.theta > -self.alpha:
            raise ValueError(f"theta must exceed -alpha, got theta={self.theta}, alpha={self.alpha}")

    def log_weight(self, n: int, j: int) -> float:
        return pd_weight(self, n, j).log

    def log_weight_ratios(self, n0: int, j0: int, n1: int, js) -> np.ndarray:
        js = np.asarray(js, dtype=int)
        if n1 < n0 or js.size == 0 or js.min() < j0:
            return super().log_weight_ratios(n0, j0, n1, js)
        for j in js:
            _check_nj(n1, int(j))
        # V(n1, j)/V(n0, j0) = (theta + j0 alpha)_{j - j0, alpha} / (theta + n0)_{n1 - n0}
        num = log_rising_prefix(self.theta + j0 * self.alpha, int(js.max()) - j0, self.alpha)
        den = log_rising_prefix(self.theta + n0, n1 - n0)[-1]
        return num[js - j0] - den

    def describe(self) -> str:
        return f"PD(alpha={self.alpha!r}, theta={self.theta!r})"


def pd_weight(params: PDParams, n: int, j: int) -> LogNumber:
    """``V(n, j) = (theta + alpha)_{j-1, alpha} / (theta + 1)_{n-1}``."""
    _check_nj(n, j)
    return gen_rising_factorial(params.theta + params.alpha, j - 1, params.alpha) / rising_factorial(
        params.theta + 1, n - 1
    )


def backward_recursion_error(model: GibbsModel, max_n: int) -> float:
    """Largest relative violation of ``V(n,j) = (n - j alpha) V(n+1,j) + V(n+1,j+1)``."""
    worst = 0.0
    for n in range(1, max_n + 1):
        for j in range(1, n + 1):
            lhs = model.log_weight(n, j)
            rhs = LogNumber.from_log(model.log_weight(n + 1, j)) * (n - j * model.alpha) + LogNumber.from_log(
                model.log_weight(n + 1, j + 1)
            )
            worst = max(worst, abs(math.expm1(rhs.log - lhs)))
    return worst


class TableGibbsModel(GibbsModel):
    """Gibbs prior given by an explicit table of weights.

    ``weights[(n, j)]`` (or a 2-D array indexed ``[n, j]``) holds ``V(n, j)``
    for ``1 <= j <= n <= max_n``.  The table is checked against the backward
    recursion on load.
    """

    def __init__(self, alpha: float, weights, *, log: bool = False, tol: float = 1e-10):
        if not 0 < alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = float(alpha)
        if isinstance(weights, Mapping):
            items = {(int(n), int(j)): float(v) for (n, j), v in weights.items()}
        else:
            arr = np.asarray(weights, dtype=float)
            items = {(n, j): float(arr[n, j]) for n in range(1, arr.shape[0]) for j in range(1, min(n, arr.shape[1] - 1) + 1)}
        self._log = {}
        for key, v in items.items():
            if log:
                self._log[key] = v
            else:
                if not v > 0:
                    raise ValueError(f"weights must be positive, got V{key}={v}")
                self._log[key] = math.log(v)
        self.max_n = max(n for n, _ in self._log)
        for n in range(1, self.max_n + 1):
            for j in range(1, n + 1):
                if (n, j) not in self._log:
                    raise ValueError(f"weight table is missing V({n},{j})")
        err = backward_recursion_error(self, self.max_n - 1)
        if err > tol:
            raise ValueError(f"weight table violates the Gibbs backward recursion (relative error {err:.3g})")

    def log_weight(self, n: int, j: int) -> float:
        _check_nj(n, j)
        try:
            return self._log[(n, j)]
        except KeyError:
            raise ValueError(f"V({n},{j}) lies outside the supplied table (max n = {self.max_n})") from None

    def describe(self) -> str:
        return f"TableGibbs(alpha={self.alpha!r}, max_n={self.max_n})"


def eppf(model: GibbsModel, multiplicities: Iterable[int]) -> LogNumber:
    """``p(n_1..n_j) = V(n, j) prod_i (1 - alpha)_{n_i - 1}``."""
    mult = [int(x) for x in multiplicities]
    if not mult:
        raise ValueError("multiplicities must be nonempty")
    if any(x <= 0 for x in mult):
        raise ValueError("multiplicities must be positive")
    out = model.weight(sum(mult), len(mult))
    for x in mult:
        out = out * rising_factorial(1 - model.alpha, x - 1)
    return out


def eppf_counts(model: GibbsModel, sample: SampleSummary) -> LogNumber:
    """Same quantity as :func:`eppf`, written over the frequency counts."""
    out = model.weight(sample.n, sample.j)
    for k, c in sample.counts:
        out = out * rising_factorial(1 - model.alpha, k - 1) ** c
    return out

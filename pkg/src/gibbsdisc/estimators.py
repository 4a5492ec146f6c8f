"""Estimators of the ``[m:k]``-discovery probability.

``U(k)`` is the posterior probability that observation ``n+m+1`` falls in a
species represented exactly ``k`` times among the first ``n+m``, when only
the basic ``n``-sample has been observed.  It splits into the part coming
from species already present in the basic sample (``old``) and the part
from species born in the additional ``m`` draws (``new``).

Two routes are provided:

* the general Gibbs route, written with non-central generalised Stirling
  numbers and arbitrary weights ``V(n, j)``;
* the closed form for the two-parameter Poisson-Dirichlet prior.

The published FLP 2012 new-species formula stops its inner sum one term
early.  It is reproduced by the ``flp2012_*`` functions (and by
``discovery_profile(..., legacy=True)``) only for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gibbs import GibbsModel, PDParams, SampleSummary
from .special import TriangleCache, log_binomial, log_connection_sum, log_rising_prefix

__all__ = [
    "KDiscovery",
    "ProfileEntry",
    "DiscoveryProfile",
    "zero_step_discovery",
    "new_species_k_discovery",
    "old_species_k_discovery",
    "flp2012_new_species_k_discovery",
    "correction_delta",
    "pd_correction_delta",
    "pd_correction_deltas",
    "pd_k_discovery",
    "pd_zero_discovery",
    "discovery_profile",
]

CORRECTED = "corrected"
LEGACY = "legacy_flp2012"


@dataclass(frozen=True)
class KDiscovery:
    total: float
    old_part: float
    new_part: float


ProfileEntry = KDiscovery


@dataclass
class DiscoveryProfile:
    """``U(k)`` for ``k = 0..n+m``; entry 0 is the new-species probability."""

    m: int
    n: int
    j: int
    values: dict[int, KDiscovery]
    model_descriptor: str
    flag: str = CORRECTED
    method: str = "closed_form"
    log_values: dict[int, tuple[float, float, float]] | None = field(default=None, repr=False)

    def total(self, k: int) -> float:
        return self.values[k].total

    def total_mass(self) -> float:
        return math.fsum(v.total for v in self.values.values())

    def ks(self) -> list[int]:
        return sorted(self.values)


def _exp(x: float) -> float:
    return math.exp(x) if x > -math.inf else 0.0


def _logaddexp_many(arrays) -> np.ndarray:
    stack = np.vstack(arrays)
    top = stack.max(axis=0)
    out = np.full(top.shape, -np.inf)
    finite = top > -np.inf
    if finite.any():
        out[finite] = top[finite] + np.log(np.exp(stack[:, finite] - top[finite]).sum(axis=0))
    # a single live term must come back bit-for-bit
    live = (stack > -np.inf).sum(axis=0) == 1
    out[live] = top[live]
    return out


def _check_mk(m: int, k: int | None = None) -> None:
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if k is not None and k < 1:
        raise ValueError(f"k must be at least 1, got {k}")


# ---------------------------------------------------------------------------
# General Gibbs route
# ---------------------------------------------------------------------------


@dataclass
class _GeneralParts:
    log_old: np.ndarray  # indexed by k = 0..n+m
    log_new: np.ndarray
    log_new_legacy: np.ndarray
    log_delta: np.ndarray


def _general_parts(model: GibbsModel, sample: SampleSummary, m: int, cache: TriangleCache | None) -> _GeneralParts:
    n, j, a = sample.n, sample.j, model.alpha
    cache = cache if cache is not None else TriangleCache()
    kmax = n + m
    # ratios[l] = log V(n+m+1, j+l) / V(n, j), l = 0..m+1
    ratios = model.log_weight_ratios(n, j, n + m + 1, np.arange(j, j + m + 2))
    one_minus = log_rising_prefix(1 - a, m)

    log_new = np.full(kmax + 1, -np.inf)
    log_new_legacy = np.full(kmax + 1, -np.inf)
    log_delta = np.full(kmax + 1, -np.inf)
    if m >= 1:
        ks = np.arange(1, m + 1)
        rows = m - ks
        tri = cache.get(a, n - j * a, m)
        lead = np.array([one_minus[k] + log_binomial(m, k) for k in ks])
        coeffs = ratios[1:]  # xi = l - 1
        log_new[1 : m + 1] = lead + log_connection_sum(coeffs, tri, rows)
        # the published sum omits the diagonal term xi = m - k
        diag = np.array([coeffs[r] + tri.log_entries[r, r] for r in rows])
        log_delta[1 : m + 1] = lead + diag
        trunc = _log_connection_sum_strict(coeffs, tri, rows)
        log_new_legacy[1 : m + 1] = lead + trunc

    terms = []
    for i, c_i in sample.counts:
        gamma = (n - i) - (j - 1) * a  # n - j alpha - i + alpha, without cancellation
        tri = cache.get(a, gamma, m)
        ks = np.arange(i, min(i + m, kmax) + 1)
        rows = m - ks + i
        lr = log_rising_prefix(i - a, m + 1)
        lead = np.array([((math.log(c_i) + log_binomial(m, k - i)) + lr[k - i + 1]) for k in ks])
        inner = log_connection_sum(ratios, tri, rows)
        t = np.full(kmax + 1, -np.inf)
        t[ks] = lead + inner
        terms.append(t)
    log_old = _logaddexp_many(terms)
    return _GeneralParts(log_old, log_new, log_new_legacy, log_delta)


def _log_connection_sum_strict(coeffs, tri, rows) -> np.ndarray:
    """Like :func:`log_connection_sum` but over ``xi < row`` only."""
    out = np.full(len(rows), -np.inf)
    for idx, r in enumerate(rows):
        if r == 0:
            continue
        v = tri.log_entries[r, :r] + coeffs[:r]
        top = v.max()
        if top > -np.inf:
            out[idx] = top + math.log(np.exp(v - top).sum())
    return out


def zero_step_discovery(model: GibbsModel, sample: SampleSummary, k: int) -> float:
    """``U_{n+0}(k) = c_k (V(n+1, j) / V(n, j)) (k - alpha)``."""
    if not 1 <= k <= sample.n:
        raise ValueError(f"k must lie in [1, n={sample.n}], got {k}")
    c_k = sample.c(k)
    if c_k == 0:
        return 0.0
    ratio = model.log_weight_ratio(sample.n, sample.j, sample.n + 1, sample.j)
    return _exp((math.log(c_k) + math.log(k - model.alpha)) + ratio)


def new_species_k_discovery(model: GibbsModel, sample: SampleSummary, m: int, k: int,
                            *, cache: TriangleCache | None = None) -> float:
    """Probability that draw ``n+m+1`` hits a species born in the ``m`` extra draws, now of size ``k``."""
    _check_mk(m, k)
    if k > m:
        return 0.0
    return _exp(_general_parts(model, sample, m, cache).log_new[k])


def old_species_k_discovery(model: GibbsModel, sample: SampleSummary, m: int, k: int,
                            *, cache: TriangleCache | None = None) -> float:
    """Probability that draw ``n+m+1`` hits a species of the basic sample that now has size ``k``."""
    _check_mk(m, k)
    if k > sample.n + m:
        return 0.0
    return _exp(_general_parts(model, sample, m, cache).log_old[k])


def flp2012_new_species_k_discovery(model: GibbsModel, sample: SampleSummary, m: int, k: int,
                                    *, cache: TriangleCache | None = None) -> float:
    """The published (truncated) new-species formula.  Kept for comparison only."""
    _check_mk(m, k)
    if k > m:
        return 0.0
    return _exp(_general_parts(model, sample, m, cache).log_new_legacy[k])


def correction_delta(model: GibbsModel, sample: SampleSummary, m: int, k: int,
                     *, cache: TriangleCache | None = None) -> float:
    """Mass missing from the published formula: ``(1-alpha)_k C(m,k) V(n+m+1, j+m-k+1) / V(n,j)``."""
    _check_mk(m, k)
    if k > m:
        return 0.0
    return _exp(_general_parts(model, sample, m, cache).log_delta[k])


# ---------------------------------------------------------------------------
# Two-parameter Poisson-Dirichlet closed forms
# ---------------------------------------------------------------------------


@dataclass
class _PDParts:
    log_old: np.ndarray
    log_new: np.ndarray
    log_delta: np.ndarray
    log_zero: float


def _pd_parts(params: PDParams, sample: SampleSummary, m: int) -> _PDParts:
    n, j, a, th = sample.n, sample.j, params.alpha, params.theta
    kmax = n + m
    den_old = log_rising_prefix(th + n, m + 1)[m + 1]  # (theta+n)_{m+1}
    den_new = log_rising_prefix(th + n + 1, m)[m]  # (theta+n+1)_m
    log_w = math.log(th + j * a) - math.log(th + n)

    terms = []
    for i, c_i in sample.counts:
        ks = np.arange(i, min(i + m, kmax) + 1)
        up = log_rising_prefix(th + n - i + a, m)
        lr = log_rising_prefix(i - a, m + 1)
        t = np.full(kmax + 1, -np.inf)
        t[ks] = [
            (((math.log(c_i) + log_binomial(m, k - i)) + up[m - k + i]) + lr[k + 1 - i]) - den_old for k in ks
        ]
        terms.append(t)
    log_old = _logaddexp_many(terms)

    log_new = np.full(kmax + 1, -np.inf)
    log_delta = np.full(kmax + 1, -np.inf)
    if m >= 1:
        one_minus = log_rising_prefix(1 - a, m)
        shifted = log_rising_prefix(th + a + n, m)
        stepped = log_rising_prefix(th + j * a, m + 1, a)
        for k in range(1, m + 1):
            log_new[k] = log_w + log_binomial(m, k) + one_minus[k] + shifted[m - k] - den_new
            log_delta[k] = log_binomial(m, k) + one_minus[k] + stepped[m - k + 1] - den_old
    log_zero = log_w + log_rising_prefix(th + a + n, m)[m] - den_new
    return _PDParts(log_old, log_new, log_delta, log_zero)


def _check_k_range(sample: SampleSummary, m: int, k: int) -> None:
    _check_mk(m)
    if not 1 <= k <= sample.n + m:
        raise ValueError(f"k must lie in [1, n+m={sample.n + m}], got {k}")


def pd_k_discovery(params: PDParams, sample: SampleSummary, m: int, k: int) -> KDiscovery:
    """Closed-form ``U(k)`` under PD(alpha, theta), with its old/new split."""
    _check_k_range(sample, m, k)
    parts = _pd_parts(params, sample, m)
    old, new = _exp(parts.log_old[k]), _exp(parts.log_new[k])
    return KDiscovery(old + new, old, new)


def pd_zero_discovery(params: PDParams, sample: SampleSummary, m: int) -> float:
    """``U(0) = (theta + j alpha) (theta + alpha + n)_m / ((theta + n) (theta + n + 1)_m)``."""
    _check_mk(m)
    return _exp(_pd_parts(params, sample, m).log_zero)


def pd_correction_delta(params: PDParams, sample: SampleSummary, m: int, k: int) -> float:
    """``C(m,k) (1-alpha)_k (theta + j alpha)_{m-k+1, alpha} / (theta + n)_{m+1}``."""
    _check_mk(m, k)
    if k > m:
        return 0.0
    return _exp(_pd_parts(params, sample, m).log_delta[k])


def pd_correction_deltas(params: PDParams, sample: SampleSummary, m: int) -> np.ndarray:
    """All deltas at once; entry ``k`` for ``k = 0..m`` (entry 0 is 0)."""
    _check_mk(m)
    log_delta = _pd_parts(params, sample, m).log_delta[: m + 1]
    return np.array([_exp(v) for v in log_delta])


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def discovery_profile(model: GibbsModel, sample: SampleSummary, m: int, *, legacy: bool = False,
                      method: str = "auto", keep_log: bool = False,
                      cache: TriangleCache | None = None) -> DiscoveryProfile:
    """Evaluate ``U(k)`` for every ``k = 0..n+m``.

    ``method`` is ``"closed_form"`` (PD only), ``"general"`` or ``"auto"``
    (closed form whenever the model is :class:`PDParams`).  With
    ``legacy=True`` the new-species part uses the published truncated sum.
    For non-PD models ``U(0)`` is ``1 - sum_k U(k)`` of the corrected
    estimates, since no separate formula is available.
    """
    _check_mk(m)
    if method == "auto":
        method = "closed_form" if isinstance(model, PDParams) else "general"
    if method not in ("closed_form", "general"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed_form" and not isinstance(model, PDParams):
        raise TypeError("the closed form needs PDParams")
    kmax = sample.n + m

    general = None
    if method == "general" or legacy:
        general = _general_parts(model, sample, m, cache)
    if method == "closed_form":
        pd = _pd_parts(model, sample, m)
        log_old, log_new, log_zero = pd.log_old, pd.log_new, pd.log_zero
    else:
        log_old, log_new, log_zero = general.log_old, general.log_new, None
    corrected_new = log_new
    if legacy:
        log_new = general.log_new_legacy

    values: dict[int, KDiscovery] = {}
    logs: dict[int, tuple[float, float, float]] = {}
    for k in range(1, kmax + 1):
        old, new = _exp(log_old[k]), _exp(log_new[k])
        values[k] = KDiscovery(old + new, old, new)
        if keep_log:
            logs[k] = (float(np.logaddexp(log_old[k], log_new[k])), float(log_old[k]), float(log_new[k]))

    if log_zero is not None:
        u0 = _exp(log_zero)
    else:
        u0 = 1.0 - math.fsum(_exp(log_old[k]) + _exp(corrected_new[k]) for k in range(1, kmax + 1))
        u0 = min(max(u0, 0.0), 1.0)
    values[0] = KDiscovery(u0, 0.0, u0)
    if keep_log:
        l0 = log_zero if log_zero is not None else (math.log(u0) if u0 > 0 else -math.inf)
        logs[0] = (l0, -math.inf, l0)
    values = dict(sorted(values.items()))
    return DiscoveryProfile(
        m=m,
        n=sample.n,
        j=sample.j,
        values=values,
        model_descriptor=model.describe(),
        flag=LEGACY if legacy else CORRECTED,
        method=method,
        log_values=dict(sorted(logs.items())) if keep_log else None,
    )

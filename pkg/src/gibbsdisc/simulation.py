"""Independent checks of the estimators.

* :func:`enumerate_exact` walks the whole predictive tree of the extra
  ``m`` draws and classifies draw ``n+m+1`` with the exact one-step
  predictive.  It never touches Stirling numbers.
* :func:`monte_carlo` runs the same urn forward with a counter-based
  generator (splitmix64 keyed by seed and replicate index), so results do
  not depend on how replicates are split across threads.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .gibbs import GibbsModel, SampleSummary

__all__ = [
    "UrnState",
    "OracleResult",
    "MonteCarloResult",
    "predictive_step",
    "simulate_path",
    "enumerate_exact",
    "monte_carlo",
    "DEFAULT_MAX_M",
]

NEW = "new"
DEFAULT_MAX_M = 6
CHUNK = 1 << 16
_SEED_MASK = (1 << 64) - 1


@dataclass
class UrnState:
    """Species sizes in order of appearance; tags ``>= j0`` were born after the basic sample."""

    sizes: list[int]
    j0: int
    initial: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.initial:
            self.initial = tuple(self.sizes[: self.j0])

    @classmethod
    def from_sample(cls, sample: SampleSummary) -> "UrnState":
        mult = sample.multiplicities
        return cls(list(mult), len(mult))

    @property
    def n_total(self) -> int:
        return sum(self.sizes)

    @property
    def j_total(self) -> int:
        return len(self.sizes)

    @property
    def new_species_count(self) -> int:
        """Number of species born after the basic sample."""
        return len(self.sizes) - self.j0

    @property
    def new_species_sizes(self) -> list[int]:
        return self.sizes[self.j0 :]

    @property
    def new_observations(self) -> int:
        """Extra draws that went to newborn species."""
        return sum(self.new_species_sizes)

    @property
    def old_growth(self) -> list[int]:
        """Extra draws received by each species of the basic sample."""
        return [s - s0 for s, s0 in zip(self.sizes[: self.j0], self.initial)]

    def new_of_size(self, k: int) -> int:
        return sum(1 for s in self.new_species_sizes if s == k)

    def old_of_size(self, k: int) -> int:
        return sum(1 for s in self.sizes[: self.j0] if s == k)


@dataclass
class OracleResult:
    """Per-``k`` probabilities of the next draw hitting a species of size ``k``."""

    old: dict[int, float]
    new: dict[int, float]
    p_new: float

    def total(self, k: int) -> float:
        return self.old.get(k, 0.0) + self.new.get(k, 0.0)

    def mass(self) -> float:
        return math.fsum([*self.old.values(), *self.new.values(), self.p_new])

    def ks(self) -> list[int]:
        return sorted(set(self.old) | set(self.new))


@dataclass
class MonteCarloResult(OracleResult):
    replicates: int = 0
    seed: int = 0
    stderr: dict[int, float] = field(default_factory=dict)
    p_new_stderr: float = 0.0

    def z_scores(self, exact) -> dict[int, float]:
        """``(estimate - exact) / stderr`` per ``k``, including ``k = 0``.

        ``exact`` is any mapping/callable giving the reference ``U(k)``.
        A zero empirical standard error (cell never hit) falls back to the
        binomial standard error of the reference value.
        """
        get = exact if callable(exact) else exact.__getitem__
        out = {}
        for k in [0, *self.ks()]:
            est = self.p_new if k == 0 else self.total(k)
            se = self.p_new_stderr if k == 0 else self.stderr[k]
            ref = get(k)
            if se == 0:
                se = math.sqrt(max(ref * (1 - ref), 0.0) / self.replicates)
            diff = est - ref
            out[k] = 0.0 if diff == 0 else (diff / se if se > 0 else math.copysign(math.inf, diff))
        return out


def _check_predictive(old_ratio: float, new_ratio: float, sizes, alpha: float) -> None:
    total = sum(s - alpha for s in sizes) * old_ratio + new_ratio
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"predictive probabilities sum to {total!r}; the weight table is not a valid Gibbs model")


def _ratios(model: GibbsModel, n: int, j: int) -> tuple[float, float]:
    r = model.log_weight_ratios(n, j, n + 1, [j, j + 1])
    return math.exp(r[0]), math.exp(r[1])


def predictive_step(model: GibbsModel, state: UrnState) -> dict:
    """One-step predictive law over existing species tags and ``"new"``."""
    n, j = state.n_total, state.j_total
    ro, rn = _ratios(model, n, j)
    _check_predictive(ro, rn, state.sizes, model.alpha)
    out = {tag: (s - model.alpha) * ro for tag, s in enumerate(state.sizes)}
    out[NEW] = rn
    return out


def simulate_path(model: GibbsModel, sample: SampleSummary, m: int, rng: np.random.Generator) -> UrnState:
    """Run the urn forward ``m`` draws from the basic sample."""
    state = UrnState.from_sample(sample)
    for _ in range(m):
        probs = predictive_step(model, state)
        tags = list(probs)
        p = np.array([probs[t] for t in tags])
        pick = tags[rng.choice(len(tags), p=p / p.sum())]
        if pick == NEW:
            state.sizes.append(1)
        else:
            state.sizes[pick] += 1
    return state


def enumerate_exact(model: GibbsModel, sample: SampleSummary, m: int, *, max_m: int = DEFAULT_MAX_M) -> OracleResult:
    """Exact law of the class of draw ``n+m+1`` by exhaustive enumeration.

    States are ``(old sizes, new sizes)`` multisets; identities are
    irrelevant by exchangeability.  Refuses ``m > max_m``.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if m > max_m:
        raise ValueError(f"m={m} exceeds the enumeration bound {max_m}")
    a = model.alpha
    n = sample.n
    start = (tuple(sorted(sample.multiplicities)), ())
    level = {start: 1.0}
    for t in range(m):
        nxt = defaultdict(float)
        for (old, new), p in level.items():
            jj = len(old) + len(new)
            ro, rn = _ratios(model, n + t, jj)
            _check_predictive(ro, rn, old + new, a)
            for s, cnt in Counter(old).items():
                grown = list(old)
                grown.remove(s)
                key = (tuple(sorted(grown + [s + 1])), new)
                nxt[key] += p * cnt * (s - a) * ro
            for s, cnt in Counter(new).items():
                grown = list(new)
                grown.remove(s)
                key = (old, tuple(sorted(grown + [s + 1])))
                nxt[key] += p * cnt * (s - a) * ro
            nxt[(old, tuple(sorted(new + (1,))))] += p * rn
        level = nxt

    old_p = defaultdict(float)
    new_p = defaultdict(float)
    p_new = 0.0
    for (old, new), p in level.items():
        ro, rn = _ratios(model, n + m, len(old) + len(new))
        for s, cnt in Counter(old).items():
            old_p[s] += p * cnt * (s - a) * ro
        for s, cnt in Counter(new).items():
            new_p[s] += p * cnt * (s - a) * ro
        p_new += p * rn
    return OracleResult(dict(sorted(old_p.items())), dict(sorted(new_p.items())), p_new)


def _ratio_tables(model: GibbsModel, n: int, j: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    # [t, b]: step t (sample size n+t) with b newborn species (j+b species)
    ro = np.zeros((m + 1, m + 2))
    rn = np.zeros((m + 1, m + 2))
    for t in range(m + 1):
        for b in range(t + 1):
            ro[t, b], rn[t, b] = _ratios(model, n + t, j + b)
    return ro, rn


def monte_carlo(model: GibbsModel, sample: SampleSummary, m: int, replicates: int, seed: int, *,
                rao_blackwell: bool = True, threads: int = 1, backend=None) -> MonteCarloResult:
    """Sequential-urn estimate of the ``[m:k]``-discovery law.

    With ``rao_blackwell`` the last draw is replaced by its exact
    predictive law, otherwise it is sampled (one-hot per replicate).
    Standard errors are ``sqrt(p (1 - p) / replicates)``.  Output depends
    only on ``(model, sample, m, replicates, seed, rao_blackwell)``.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be positive, got {replicates}")
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    k_mod = backend or kernels
    n, j = sample.n, sample.j
    ro, rn = _ratio_tables(model, n, j, m)
    init = np.array(sample.multiplicities, dtype=np.int64)
    seed64 = int(seed) & _SEED_MASK
    chunks = [(s, min(s + CHUNK, replicates)) for s in range(0, replicates, CHUNK)]

    def run(bounds):
        return k_mod.urn_accumulate(init, m, float(model.alpha), ro, rn, seed64, bounds[0], bounds[1],
                                    bool(rao_blackwell))

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]

    kmax = n + m
    old = np.zeros(kmax + 2)
    new = np.zeros(kmax + 2)
    p_new = 0.0
    for o, w, p in results:  # reduced in chunk order
        old += o
        new += w
        p_new += p
    old /= replicates
    new /= replicates
    p_new /= replicates

    def se(p):
        return math.sqrt(max(p * (1 - p), 0.0) / replicates)

    old_d = {k: float(old[k]) for k in range(1, kmax + 1)}
    new_d = {k: float(new[k]) for k in range(1, kmax + 1)}
    stderr = {k: se(old_d[k] + new_d[k]) for k in range(1, kmax + 1)}
    return MonteCarloResult(old_d, new_d, float(p_new), replicates=replicates, seed=int(seed),
                            stderr=stderr, p_new_stderr=se(p_new))


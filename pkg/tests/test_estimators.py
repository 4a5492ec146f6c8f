import math
from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pd_grid, pd_params, random_sample, samples
from gibbsdisc.estimators import (
    LEGACY,
    correction_delta,
    discovery_profile,
    flp2012_new_species_k_discovery,
    new_species_k_discovery,
    old_species_k_discovery,
    pd_correction_delta,
    pd_correction_deltas,
    pd_k_discovery,
    pd_zero_discovery,
    zero_step_discovery,
)
from gibbsdisc.gibbs import PDParams, SampleSummary, TableGibbsModel, pd_weight
from gibbsdisc.special import TriangleCache


def tree_oracle(alpha, theta, mult, m):
    """Exact PD predictive tree in rationals: ({k: old}, {k: new}, p_new)."""
    alpha, theta = Fraction(alpha), Fraction(theta)
    level = {(tuple(sorted(mult)), ()): Fraction(1)}
    n = sum(mult)
    for t in range(m):
        nxt = defaultdict(Fraction)
        for (old, new), p in level.items():
            denom = theta + n + t
            j = len(old) + len(new)
            for which, group in ((0, old), (1, new)):
                for idx, s in enumerate(group):
                    grown = list(group)
                    grown[idx] += 1
                    key = (tuple(sorted(grown)), new) if which == 0 else (old, tuple(sorted(grown)))
                    nxt[key] += p * (s - alpha) / denom
            nxt[(old, tuple(sorted(new + (1,))))] += p * (theta + j * alpha) / denom
        level = nxt
    old_p, new_p, p_new = defaultdict(Fraction), defaultdict(Fraction), Fraction(0)
    for (old, new), p in level.items():
        denom = theta + n + m
        for s in old:
            old_p[s] += p * (s - alpha) / denom
        for s in new:
            new_p[s] += p * (s - alpha) / denom
        p_new += p * (theta + (len(old) + len(new)) * alpha) / denom
    return dict(old_p), dict(new_p), p_new


HALF = Fraction(1, 2)


def test_tree_oracle_anchor():
    old, new, p0 = tree_oracle(HALF, HALF, [1], 1)
    assert p0 == Fraction(8, 15)
    assert old == {1: Fraction(2, 15), 2: Fraction(3, 15)}
    assert new == {1: Fraction(2, 15)}


# -- zero-step ------------------------------------------------------------


def test_zero_step_examples(pd_half):
    assert zero_step_discovery(pd_half, SampleSummary.from_counts({1: 1}), 1) == pytest.approx(1 / 3, rel=1e-15)
    assert zero_step_discovery(pd_half, SampleSummary.from_counts({2: 1}), 2) == pytest.approx(0.6, rel=1e-15)
    assert zero_step_discovery(pd_half, SampleSummary.from_counts({2: 1}), 1) == 0.0


def test_zero_step_rejects_k(pd_half, one_singleton):
    for k in (0, 2):
        with pytest.raises(ValueError):
            zero_step_discovery(pd_half, one_singleton, k)


# -- general Gibbs route --------------------------------------------------


def test_new_species_examples(pd_half, one_singleton):
    assert new_species_k_discovery(pd_half, one_singleton, 0, 1) == 0.0
    assert new_species_k_discovery(pd_half, one_singleton, 1, 1) == pytest.approx(2 / 15, rel=1e-14)
    assert new_species_k_discovery(pd_half, one_singleton, 1, 2) == 0.0


@pytest.mark.parametrize("params", [PDParams(0.5, 0.5), PDParams(0.3, 4.0), PDParams(0.9, -0.4)], ids=str)
@pytest.mark.parametrize("m", [1, 3, 7])
def test_new_species_k_equals_m_single_term(params, m):
    s = SampleSummary.from_multiplicities([3, 1, 1])
    want = math.exp(exact_log_rising(1 - params.alpha, m) + params.log_weight(s.n + m + 1, s.j + 1)
                    - params.log_weight(s.n, s.j))
    assert new_species_k_discovery(params, s, m, m) == pytest.approx(want, rel=1e-12)


def exact_log_rising(x, n):
    return math.fsum(math.log(x + i) for i in range(n))


def test_old_species_examples(pd_half, one_singleton):
    assert old_species_k_discovery(pd_half, one_singleton, 1, 1) == pytest.approx(2 / 15, rel=1e-14)
    assert old_species_k_discovery(pd_half, one_singleton, 1, 2) == pytest.approx(0.2, rel=1e-14)


def test_general_route_rejects_bad_arguments(pd_half, one_singleton):
    with pytest.raises(ValueError):
        new_species_k_discovery(pd_half, one_singleton, -1, 1)
    with pytest.raises(ValueError):
        old_species_k_discovery(pd_half, one_singleton, 1, 0)


# -- closed forms ---------------------------------------------------------


def test_pd_k_examples(pd_half, one_singleton):
    r1 = pd_k_discovery(pd_half, one_singleton, 1, 1)
    assert (r1.total, r1.old_part, r1.new_part) == pytest.approx((4 / 15, 2 / 15, 2 / 15), rel=1e-14)
    r2 = pd_k_discovery(pd_half, one_singleton, 1, 2)
    assert (r2.total, r2.old_part, r2.new_part) == pytest.approx((0.2, 0.2, 0.0), rel=1e-14)
    assert r2.new_part == 0.0


def test_pd_k_rejects_out_of_range(pd_half, one_singleton):
    for k in (0, 3):
        with pytest.raises(ValueError):
            pd_k_discovery(pd_half, one_singleton, 1, k)


def test_pd_zero_examples(pd_half, one_singleton):
    assert pd_zero_discovery(pd_half, one_singleton, 0) == pytest.approx(2 / 3, rel=1e-15)
    assert pd_zero_discovery(pd_half, one_singleton, 1) == pytest.approx(8 / 15, rel=1e-15)
    total = pd_zero_discovery(pd_half, one_singleton, 1) + sum(
        pd_k_discovery(pd_half, one_singleton, 1, k).total for k in (1, 2)
    )
    assert total == pytest.approx(1.0, abs=1e-15)


# -- exact-rational agreement on small shapes -----------------------------


SHAPES = [[1], [2], [1, 1], [3], [2, 1], [1, 1, 1], [4], [3, 1], [2, 2], [2, 1, 1], [1, 1, 1, 1]]
RATIONAL_PARAMS = [(HALF, HALF), (Fraction(1, 4), Fraction(-1, 8)), (Fraction(9, 10), Fraction(10)),
                   (Fraction(1, 10), Fraction(100))]


@pytest.mark.parametrize("a, th", RATIONAL_PARAMS, ids=str)
@pytest.mark.parametrize("mult", SHAPES, ids=str)
@pytest.mark.parametrize("m", range(0, 6))
def test_estimators_match_rational_tree(a, th, mult, m):
    old, new, p0 = tree_oracle(a, th, mult, m)
    params = PDParams(float(a), float(th))
    s = SampleSummary.from_multiplicities(mult)
    closed = discovery_profile(params, s, m)
    general = discovery_profile(params, s, m, method="general")
    assert closed.values[0].total == pytest.approx(float(p0), abs=1e-14)
    for k in range(1, s.n + m + 1):
        for prof in (closed, general):
            assert prof.values[k].old_part == pytest.approx(float(old.get(k, 0)), abs=1e-14)
            assert prof.values[k].new_part == pytest.approx(float(new.get(k, 0)), abs=1e-14)


# -- identities -----------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(pd_params(), samples(), st.sampled_from([0, 1, 2, 5, 10, 50]))
def test_sum_to_one_property(params, s, m):
    assert abs(discovery_profile(params, s, m).total_mass() - 1.0) < 1e-10


@settings(max_examples=60, deadline=None)
@given(pd_params(), samples(), st.integers(0, 30))
def test_partial_sums(params, s, m):
    a, th, n, j = params.alpha, params.theta, s.n, s.j
    prof = discovery_profile(params, s, m)
    new_sum = math.fsum(prof.values[k].new_part for k in range(1, m + 1))
    ratio = math.exp(exact_log_rising(th + a + n, m) - exact_log_rising(th + n + 1, m))
    assert new_sum == pytest.approx((th + j * a) / (th + n) * (1 - ratio), abs=1e-10)
    old_sum = math.fsum(prof.values[k].old_part for k in range(1, n + m + 1))
    assert old_sum == pytest.approx((n - j * a) / (th + n), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(pd_params(), samples(max_n=12), st.integers(0, 20))
def test_closed_form_matches_general_route(params, s, m):
    cache = TriangleCache()
    for k in range(1, s.n + m + 1):
        closed = pd_k_discovery(params, s, m, k).total
        general = new_species_k_discovery(params, s, m, k, cache=cache) + old_species_k_discovery(
            params, s, m, k, cache=cache
        )
        if closed == 0:
            assert general == 0
        else:
            assert abs(general - closed) / closed < 1e-10


@settings(max_examples=40, deadline=None)
@given(pd_params(), samples(max_n=12), st.integers(1, 20), st.data())
def test_delta_identity(params, s, m, data):
    k = data.draw(st.integers(1, m))
    corrected = new_species_k_discovery(params, s, m, k)
    legacy = flp2012_new_species_k_discovery(params, s, m, k)
    delta = correction_delta(params, s, m, k)
    assert delta > 0
    # the difference of two rounded sums is only good to rounding of the larger one
    assert abs((corrected - legacy) - delta) <= 1e-12 * corrected
    assert pd_correction_delta(params, s, m, k) == pytest.approx(delta, rel=1e-12)


def test_legacy_examples(pd_half, one_singleton):
    assert flp2012_new_species_k_discovery(pd_half, one_singleton, 1, 1) == 0.0
    for m in (1, 4, 9):
        assert flp2012_new_species_k_discovery(pd_half, one_singleton, m, m) == 0.0
    assert correction_delta(pd_half, one_singleton, 1, 1) == pytest.approx(2 / 15, rel=1e-14)
    assert pd_correction_delta(pd_half, one_singleton, 1, 1) == pytest.approx(2 / 15, rel=1e-14)
    assert correction_delta(pd_half, one_singleton, 1, 2) == 0.0
    assert pd_correction_delta(pd_half, one_singleton, 1, 2) == 0.0


@pytest.mark.parametrize("params", pd_grid(), ids=str)
def test_m_zero_reduction_is_exact(params, rng):
    for _ in range(5):
        s = random_sample(rng)
        for k in range(1, s.n + 1):
            z = zero_step_discovery(params, s, k)
            assert new_species_k_discovery(params, s, 0, k) == 0.0
            assert old_species_k_discovery(params, s, 0, k) == z
            assert pd_k_discovery(params, s, 0, k).total == z
            assert pd_k_discovery(params, s, 0, k).total == pytest.approx(s.c(k) * (k - params.alpha) / (params.theta + s.n),
                                                                          rel=1e-15)


# -- profiles ---------------------------------------------------------------


def test_profile_anchor(pd_half, one_singleton):
    prof = discovery_profile(pd_half, one_singleton, 1)
    assert prof.ks() == [0, 1, 2]
    assert [prof.total(k) for k in range(3)] == pytest.approx([8 / 15, 4 / 15, 3 / 15], rel=1e-14)
    for v in prof.values.values():
        assert 0 <= v.total <= 1
        assert v.total == pytest.approx(v.old_part + v.new_part, abs=1e-12)


def test_profile_m_zero_is_one_step_predictive(pd_half):
    s = SampleSummary.from_multiplicities([3, 1, 1])
    prof = discovery_profile(pd_half, s, 0)
    assert prof.total(0) == pytest.approx((0.5 + 3 * 0.5) / 5.5, rel=1e-15)
    assert prof.total(1) == pytest.approx(2 * 0.5 / 5.5, rel=1e-15)
    assert prof.total(2) == 0.0
    assert prof.total(3) == pytest.approx(2.5 / 5.5, rel=1e-15)


def test_legacy_profile_deficit(pd_half):
    s = SampleSummary.from_multiplicities([2, 1, 1])
    m = 6
    leg = discovery_profile(pd_half, s, m, legacy=True)
    assert leg.flag == LEGACY
    deficit = math.fsum(pd_correction_delta(pd_half, s, m, k) for k in range(1, m + 1))
    assert 1 - leg.total_mass() == pytest.approx(deficit, abs=1e-12)
    assert leg.total_mass() < 1


def test_profile_keep_log(pd_half, one_singleton):
    prof = discovery_profile(pd_half, one_singleton, 1, keep_log=True)
    assert math.exp(prof.log_values[1][0]) == pytest.approx(4 / 15, rel=1e-14)
    assert math.exp(prof.log_values[0][0]) == pytest.approx(8 / 15, rel=1e-14)


def test_profile_extreme_sizes_stay_finite():
    params = PDParams(0.6, 3.0)
    s = SampleSummary.from_counts({1: 400, 2: 150, 3: 60, 7: 10, 40: 2})
    prof = discovery_profile(params, s, 2000)
    assert abs(prof.total_mass() - 1) < 1e-9
    assert all(0 <= v.total <= 1 for v in prof.values.values())


def test_general_profile_for_table_model():
    pd = PDParams(0.35, 2.0)
    table = {(n, j): float(pd_weight(pd, n, j)) for n in range(1, 20) for j in range(1, n + 1)}
    model = TableGibbsModel(0.35, table)
    s = SampleSummary.from_multiplicities([3, 2, 1, 1])
    prof = discovery_profile(model, s, 8)
    assert prof.method == "general"
    ref = discovery_profile(pd, s, 8)
    for k in prof.ks():
        assert prof.total(k) == pytest.approx(ref.total(k), rel=1e-10, abs=1e-15)
    with pytest.raises(TypeError):
        discovery_profile(model, s, 8, method="closed_form")


def test_profile_rejects_unknown_method(pd_half, one_singleton):
    with pytest.raises(ValueError):
        discovery_profile(pd_half, one_singleton, 1, method="magic")
    with pytest.raises(ValueError):
        discovery_profile(pd_half, one_singleton, -1)


def test_vector_deltas_match_scalar(pd_half):
    s = SampleSummary.from_counts({1: 2, 3: 1})
    vec = pd_correction_deltas(pd_half, s, 6)
    assert vec[0] == 0.0
    assert list(vec[1:]) == [pd_correction_delta(pd_half, s, 6, k) for k in range(1, 7)]

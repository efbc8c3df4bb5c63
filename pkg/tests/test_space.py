import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpoi import codec
from cpoi.space import (FamilyStats, GapsRequiredError, UnsortedSetError, bounds_disjoint,
                        bounds_overlap, evaluate_conditions, gaps, gaps_by_sum, space_cpoi,
                        space_cpoi_u, space_poi, space_unary_best, total_gaps)

EXAMPLE_FAMILY = [[1, 2, 3], [4, 5], [6], [1, 2, 7], [4, 8]]


def test_gaps_examples():
    assert gaps([1, 4, 8]) == 7
    assert gaps([42]) == 0
    assert gaps([]) == 0
    assert gaps([1, 5, 100]) == gaps([1, 80, 100]) == 99


def test_gaps_unsorted():
    with pytest.raises(UnsortedSetError):
        gaps([3, 1])


def test_total_gaps_example():
    assert total_gaps(EXAMPLE_FAMILY) == 2 + 1 + 0 + 6 + 4
    assert total_gaps([]) == 0


def test_space_formulas_example():
    s = FamilyStats.from_family(EXAMPLE_FAMILY, 8)
    assert s.sum_sizes == 11 and s.n_count == 5
    assert space_poi(s) == 352
    assert space_cpoi(s, 13) == 173
    assert space_cpoi_u(s) == 33
    assert space_poi(FamilyStats.from_family([], 8)) == 0


def test_uniform_ratio_million():
    s = FamilyStats(n_count=1, t_count=10**6, sizes=(10,))
    assert s.width == 20
    assert space_cpoi_u(s) / space_poi(s) == pytest.approx(0.625)


def test_singletons_cost_first_ids_only():
    s = FamilyStats.from_family([[3], [9], [12]], 20)
    assert space_cpoi(s, total_gaps([[3], [9], [12]])) == 96


def test_stats_validation():
    with pytest.raises(ValueError):
        FamilyStats(1, 1, (1,), B=12)


def test_empty_nodes_do_not_count():
    s = FamilyStats.from_family([[1, 2], []], 5)
    assert s.n_count == 1


def test_bounds_disjoint_cases():
    assert bounds_disjoint(FamilyStats.from_family([[1], [2], [3]], 3)) == (0, 0)
    assert bounds_disjoint(FamilyStats(3, 100, (30, 30, 40))) == (97, 291)
    with pytest.raises(ValueError):
        bounds_disjoint(FamilyStats(4, 3, (1, 1, 1, 1)))


def test_worst_disjoint_construction_hits_upper_bound():
    t, n = 40, 7
    fam = [[k, t - k + 1] for k in range(1, n + 1)]
    s = FamilyStats.from_family(fam, t)
    assert total_gaps(fam) == bounds_disjoint(s)[1]


def test_chain_family_hits_overlap_lower_bound():
    fam = [[1, 2, 3], [2, 3, 4], [3, 4, 5, 6], [5, 6, 7]]
    s = FamilyStats.from_family(fam, 7)
    assert total_gaps(fam) == bounds_overlap(s)[0] == 9


def test_single_node_lower_bound():
    s = FamilyStats.from_family([[4, 5, 6, 7]], 10)
    assert bounds_overlap(s)[0] == 3 == gaps([4, 5, 6, 7])


def test_gaps_needed_for_prop3_and_prop5():
    s = FamilyStats.from_family(EXAMPLE_FAMILY, 8)
    with pytest.raises(GapsRequiredError):
        evaluate_conditions(s, require=("prop3",))
    rep = evaluate_conditions(s)
    assert rep.prop3 is None and rep.needs_gaps
    rep = evaluate_conditions(s, 13, require=("prop3", "prop5"))
    assert rep.prop3 is True and rep.prop5 is False


def test_dense_stats_meet_no_gap_conditions():
    # few triples, large nodes: the conditions that skip Gaps(N) both hold
    s = FamilyStats(n_count=6, t_count=30000, sizes=(26000,) * 6)
    rep = evaluate_conditions(s)
    assert rep.prop4 and rep.eq6 and rep.eq8


def test_report_output_formats():
    rep = evaluate_conditions(FamilyStats.from_family(EXAMPLE_FAMILY, 8), 13)
    assert rep.as_csv().splitlines()[0] == "condition,value"
    assert "prop3" in rep.as_text()


def test_gap_formulas_agree_exhaustively():
    for r in range(0, 6):
        for combo in itertools.combinations(range(1, 11), r):
            assert gaps(combo) == gaps_by_sum(combo)


@given(st.sets(st.integers(1, 10**9), max_size=200).map(sorted))
def test_gap_formulas_agree_random(ids):
    assert gaps(ids) == gaps_by_sum(ids)


families = st.integers(1, 500).flatmap(
    lambda t: st.tuples(st.just(t), st.lists(st.sets(st.integers(1, t), min_size=1, max_size=40).map(sorted),
                                             min_size=1, max_size=50)))


@settings(max_examples=300, deadline=None)
@given(families, st.sampled_from([8, 16, 32]))
def test_conditions_are_sound(tf, B):
    t, fam = tf
    s = FamilyStats.from_family(fam, t, B=B)
    G = total_gaps(fam)
    lo, hi = bounds_overlap(s)
    assert lo <= G <= hi
    for n in fam:
        assert len(n) - 1 <= gaps(n) <= t - 1
    rep = evaluate_conditions(s, G)
    assert rep.implications_hold()
    if rep.prop3:
        assert space_cpoi(s, G) < space_poi(s)
    if rep.prop4:
        assert space_cpoi(s, G) < space_poi(s)
    if rep.prop5:
        assert space_cpoi(s, G) <= space_cpoi_u(s)
    if rep.eq6:
        assert space_cpoi(s, G) <= space_cpoi_u(s)
    if rep.eq7:
        assert space_cpoi_u(s) <= space_unary_best(s)
    assert space_cpoi(s, G) == B * s.n_count + codec.tail_bits(fam, codec.UNARY)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 500), st.integers(1, 50), st.integers(0, 2**32 - 1))
def test_disjoint_bounds_hold(t, n, seed):
    n = min(n, t)
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, n + 1, t)  # label n means "left out"
    labels[:n] = np.arange(n)  # every node non-empty
    rng.shuffle(labels)
    fam = [np.flatnonzero(labels == k) + 1 for k in range(n)]
    s = FamilyStats.from_family(fam, t)
    lo, hi = bounds_disjoint(s)
    G = total_gaps(fam)
    assert G <= hi
    if not (labels == n).any():  # lower end only for full partitions
        assert lo <= G

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamdecomp.errors import InputError, NoPerfectMatching, NotRegular, ResampleBudgetExhausted
from hamdecomp.factorizer import (
    BipartiteGraph,
    FewCycleParams,
    OneFactor,
    count_cycles,
    cycle_structure,
    default_cycle_cap,
    double_cover,
    few_cycle_one_factor,
    maximum_matching,
    one_factorization,
    perfect_matching,
    sample_matching,
)
from hamdecomp.graph import Digraph, build_oriented, circulant_tournament, random_regular_tournament
from hamdecomp.rng import derive_seed, make_rng

TRIANGLE = build_oriented(3, [(0, 1), (1, 2), (2, 0)])


def brute_max_matching(b: BipartiteGraph) -> int:
    best = 0
    for k in range(min(b.n_left, b.n_right), 0, -1):
        for xs in itertools.combinations(range(b.n_left), k):
            for ys in itertools.permutations(range(b.n_right), k):
                if all(b.has_edge(x, y) for x, y in zip(xs, ys)):
                    return k
    return best


def test_double_cover_examples():
    b = double_cover(TRIANGLE)
    assert (b.n_left, b.n_right, b.num_edges) == (3, 3, 3)
    assert perfect_matching(b) == [1, 2, 0]
    c = double_cover(circulant_tournament(5, {1, 2}))
    assert c.left_degrees() == [2] * 5 and c.right_degrees() == [2] * 5
    empty = double_cover(Digraph(4, [0] * 4))
    assert empty.num_edges == 0 and perfect_matching(empty) is None


def test_matching_examples():
    k44 = BipartiteGraph(4, 4, [0b1111] * 4)
    ml = perfect_matching(k44)
    assert sorted(ml) == [0, 1, 2, 3]
    one = BipartiteGraph(4, 4, [1 << 2, 1 << 0, 1 << 3, 1 << 1])
    assert perfect_matching(one) == [2, 0, 3, 1]
    star = BipartiteGraph(3, 3, [0b111, 0, 0])
    assert perfect_matching(star) is None
    assert sum(y >= 0 for y in maximum_matching(star)) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_maximum_matching_against_brute_force(nl, nr, data):
    rows = [data.draw(st.integers(0, (1 << nr) - 1)) for _ in range(nl)]
    b = BipartiteGraph(nl, nr, rows)
    ml = maximum_matching(b)
    used = [y for y in ml if y >= 0]
    assert len(used) == len(set(used))
    assert all(b.has_edge(x, y) for x, y in enumerate(ml) if y >= 0)
    assert len(used) == brute_max_matching(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).map(lambda k: 2 * k + 1), st.integers(0, 2**32))
def test_one_factorization_partitions_edges(n, seed):
    g = random_regular_tournament(n, mix_steps=10 * n, seed=seed)
    factors = one_factorization(g)
    assert len(factors) == (n - 1) // 2
    edges = [e for f in factors for e in f.edges()]
    assert len(edges) == len(set(edges)) == g.num_edges
    assert set(edges) == set(g.edges())


def test_one_factorization_small_cases():
    assert one_factorization(TRIANGLE) == [OneFactor((1, 2, 0))]
    fs = one_factorization(circulant_tournament(5, {1, 2}))
    assert len(fs) == 2 and all(count_cycles(f.successor) == 1 for f in fs)


def test_one_factorization_n51():
    g = random_regular_tournament(51, seed=3)
    fs = one_factorization(g)
    edges = [e for f in fs for e in f.edges()]
    assert len(fs) == 25 and len(edges) == 1275 and set(edges) == set(g.edges())


def test_one_factorization_requires_regular():
    with pytest.raises(NotRegular):
        one_factorization(build_oriented(3, [(0, 1), (1, 2)]))


def test_sample_matching_trivial_cases():
    one = BipartiteGraph(3, 3, [1 << 1, 1 << 2, 1 << 0])
    assert sample_matching(one, steps=1000, seed=1) == [1, 2, 0]
    k33 = BipartiteGraph(3, 3, [0b111] * 3)
    start = perfect_matching(k33)
    assert sample_matching(k33, steps=0, seed=1) == start
    with pytest.raises(NoPerfectMatching):
        sample_matching(BipartiteGraph(2, 2, [0b11, 0]), steps=5)


def _k33_chain_matrix():
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    P = np.zeros((6, 6))
    for p in perms:
        for x1 in range(3):
            for x2 in range(3):
                q = list(p)
                if x1 != x2:
                    q[x1], q[x2] = q[x2], q[x1]
                P[index[p], index[tuple(q)]] += 0.5 / 9
                P[index[p], index[p]] += 0.5 / 9
    return perms, P


def test_k33_chain_mixes_within_100_steps():
    perms, P = _k33_chain_matrix()
    dist = np.linalg.matrix_power(P, 100)
    assert np.abs(dist - 1 / 6).max() < 1e-12


def test_k33_matching_frequencies():
    k33 = BipartiteGraph(3, 3, [0b111] * 3)
    counts = Counter(tuple(sample_matching(k33, steps=100, seed=derive_seed(77, t))) for t in range(6000))
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / 6000 - 1 / 6) <= 0.02


@pytest.mark.parametrize("n,trials", [(501, 100), (1001, 25)])
def test_sampled_factor_has_few_cycles(n, trials):
    g = random_regular_tournament(n, mix_steps=n * n, seed=n)
    cover = double_cover(g)
    start = perfect_matching(cover)
    cap = n / math.log2(n) ** 0.2
    good = sum(count_cycles(sample_matching(cover, cover.num_edges, derive_seed(n, t), start)) <= cap
               for t in range(trials))
    assert good >= 0.99 * trials


def test_sample_matching_stays_perfect():
    g = random_regular_tournament(31, seed=2)
    cover = double_cover(g)
    for t in range(20):
        ml = sample_matching(cover, 500, seed=t)
        assert sorted(ml) == list(range(31)) and all(cover.has_edge(x, y) for x, y in enumerate(ml))


def test_cycle_structure_examples():
    five = cycle_structure([1, 2, 3, 4, 0])
    assert [len(c) for c in five.cycles] == [5]
    mixed = cycle_structure([1, 2, 0, 4, 5, 6, 3])
    assert sorted(len(c) for c in mixed.cycles) == [3, 4]


@given(st.permutations(list(range(12))))
def test_cycle_lengths_sum_to_n(perm):
    cs = cycle_structure(perm)
    assert sum(len(c) for c in cs.cycles) == 12
    assert len(cs) == count_cycles(perm)


def test_one_factor_validation():
    with pytest.raises(InputError):
        OneFactor((0, 0, 1))
    f = OneFactor((1, 2, 0))
    assert f.predecessor() == [2, 0, 1] and f.is_factor_of(TRIANGLE)


def test_few_cycle_trivial_cases():
    g = random_regular_tournament(15, seed=1)
    f = few_cycle_one_factor(g, None, FewCycleParams(cycle_cap=15), seed=4)
    assert f.is_factor_of(g)
    assert few_cycle_one_factor(TRIANGLE, None, FewCycleParams(), seed=0).successor == (1, 2, 0)


def test_few_cycle_caps_n101():
    g = random_regular_tournament(101, seed=11)
    h_factor = one_factorization(g)[0]
    h = Digraph.from_edges(101, h_factor.edges())
    rng = make_rng(5)
    sets = tuple(tuple(sorted(rng.choice(101, 20, replace=False).tolist())) for _ in range(5))
    p = FewCycleParams(theta2=0.2, cycle_cap=64, sets=sets)
    stats: dict = {}
    f = few_cycle_one_factor(g, h, p, seed=8, stats=stats)
    assert f.is_factor_of(g)
    assert count_cycles(f.successor) <= 64
    for s in sets:
        members = set(s)
        hits = sum(1 for x, y in f.edges() if h.has_edge(x, y) and (x in members or y in members))
        assert hits <= 0.2 * len(s)


def test_few_cycle_budget_error():
    g = circulant_tournament(7, {1, 2, 3})
    with pytest.raises(ResampleBudgetExhausted):
        few_cycle_one_factor(g, None, FewCycleParams(cycle_cap=0, max_resamples=3), seed=0)


def test_default_cycle_cap():
    assert default_cycle_cap(1) == 1
    assert default_cycle_cap(101) == math.ceil(101 / math.log2(101) ** 0.2)

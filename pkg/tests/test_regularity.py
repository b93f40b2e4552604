import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamdecomp.errors import (
    InputError,
    RetryBudgetExhausted,
    TooLargeForExhaustive,
    TooManyBadVertices,
)
from hamdecomp.flow import BipartitePair, random_super_regular_pair
from hamdecomp.regularity import (
    bounded_degree_subgraph,
    check_regularity,
    check_super_regularity,
    restrict_pair,
    split_pair,
    trim_super_regular,
)
from hamdecomp.rng import derive_seed, make_rng


def brute_worst_deviation(pair: BipartitePair, ref: float, eps: float) -> float:
    m = pair.m
    lo = max(1, math.ceil(eps * m - 1e-9))
    worst = 0.0
    for s in range(lo, m + 1):
        for X in itertools.combinations(range(m), s):
            for t in range(lo, m + 1):
                for Y in itertools.combinations(range(m), t):
                    e = sum(pair.has_edge(a, b) for a in X for b in Y)
                    worst = max(worst, abs(e / (s * t) - ref))
    return worst


def random_pair(m, p, seed):
    mat = make_rng(seed).random((m, m)) < p
    return BipartitePair(m, [sum(1 << int(j) for j in np.nonzero(row)[0]) for row in mat])


def test_complete_and_empty_pairs_are_regular():
    for pair in (BipartitePair.complete(6), BipartitePair(6, [0] * 6)):
        v = check_regularity(pair, 0.2, 0.3)
        assert v.regular and v.worst_deviation == 0 and v.exact


def test_block_pair_refuted_with_witness():
    m = 8
    rows = [0b1111 for _ in range(4)] + [0] * 4
    pair = BipartitePair(m, rows)
    v = check_regularity(pair, 0.25, 0.1)
    assert not v.regular
    assert v.worst_deviation == pytest.approx(0.75)
    X, Y = v.witness
    assert set(X) <= {0, 1, 2, 3} and set(Y) <= {0, 1, 2, 3}


def test_regularity_parameter_checks():
    pair = BipartitePair.complete(4)
    with pytest.raises(InputError):
        check_regularity(pair, 0.0, 0.2)
    with pytest.raises(TooLargeForExhaustive):
        check_regularity(BipartitePair.complete(19), 0.1, 0.2)
    with pytest.raises(InputError):
        check_regularity(pair, 0.1, 0.2, mode="magic")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.floats(0.05, 0.6), st.data())
def test_exhaustive_matches_brute_force(m, eps, data):
    rows = [data.draw(st.integers(0, (1 << m) - 1)) for _ in range(m)]
    pair = BipartitePair(m, rows)
    v = check_regularity(pair, eps, 0.99)
    assert v.worst_deviation == pytest.approx(brute_worst_deviation(pair, pair.density, eps), abs=1e-12)
    X, Y = v.witness
    e = sum(pair.has_edge(a, b) for a in X for b in Y)
    assert abs(e / (len(X) * len(Y)) - pair.density) == pytest.approx(v.worst_deviation, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(5, 12), st.integers(0, 2**32))
def test_sampled_mode_never_exceeds_exhaustive(m, seed):
    pair = random_pair(m, 0.5, seed)
    ex = check_regularity(pair, 0.2, 0.5)
    sa = check_regularity(pair, 0.2, 0.5, mode="sampled", trials=50, seed=seed)
    assert not sa.exact and sa.worst_deviation <= ex.worst_deviation + 1e-12


def test_super_regular_complete():
    v = check_super_regularity(BipartitePair.complete(10), 0.05, 1.0)
    assert v.super_regular


def test_super_regular_degree_failure():
    m = 50
    rows = [(1 << m) - 1] * m
    rows[7] = 0
    v = check_super_regularity(BipartitePair(m, rows), 0.01, 1.0, mode="sampled", trials=20)
    assert not v.degree_ok and 7 in v.bad_left


def test_super_regular_sampled_large():
    pair = random_pair(400, 0.3, 1)
    v = check_super_regularity(pair, 0.05, 0.3, trials=100)
    lo, hi = 0.25 * 400, 0.35 * 400
    expected_bad = [a for a, d in enumerate(pair.left_degrees()) if not lo <= d <= hi]
    assert not v.density_exact and v.bad_left == expected_bad


def test_split_k1_keeps_every_edge():
    pair = random_pair(30, 0.4, 2)
    (part,) = split_pair(pair, 1, seed=3)
    assert part.rows == pair.rows


@pytest.mark.parametrize("K,density", [(2, 1.0), (3, 0.6)])
def test_split_part_densities(K, density):
    m = 500
    pair = BipartitePair.complete(m) if density == 1.0 else random_pair(m, density, 5)
    for s in range(5):
        parts = split_pair(pair, K, seed=s)
        assert len(parts) == K
        for p in parts:
            assert abs(p.density - pair.density / K) <= 0.01
            assert all(not (p.rows[a] & ~pair.rows[a]) for a in range(m))
        for i in range(K):
            for j in range(i + 1, K):
                assert all(not (parts[i].rows[a] & parts[j].rows[a]) for a in range(m))


def test_split_fractional_k_leaves_edges_out():
    pair = BipartitePair.complete(60)
    parts = split_pair(pair, 2.5, seed=1)
    assert len(parts) == 2
    assert sum(p.num_edges for p in parts) < pair.num_edges


def test_split_rejects_small_k():
    with pytest.raises(InputError):
        split_pair(BipartitePair.complete(3), 0.5, seed=0)


def test_restrict_pair():
    pair = BipartitePair(3, [0b011, 0b110, 0b101])
    sub = restrict_pair(pair, [0, 2], [0, 2])
    assert sub.rows == (0b01, 0b11)
    assert sub.left_labels == (0, 2) and sub.right_labels == (3, 5)


def _circulant_pair(m, deg, low=(), low_deg=None, labels=None):
    rows = []
    for i in range(m):
        d = low_deg if i in low else deg
        rows.append(sum(1 << ((i + s) % m) for s in range(d)))
    return BipartitePair(m, rows)


def test_trim_already_super_regular():
    m, eps, beta = 100, 0.05, 0.3
    pairs = [random_super_regular_pair(m, beta, eps, seed=s) for s in range(3)]
    res = trim_super_regular(pairs, eps, beta)
    quota = math.floor(4 * eps * m)
    assert all(len(k) == m - quota for k in res.kept)
    assert all(not b for b in res.deleted_bad)


def test_trim_deletes_planted_vertices_first():
    m, eps, beta = 100, 0.05, 0.3
    planted = list(range(0, 100, 10))
    pairs = [_circulant_pair(m, 30, low=set(planted), low_deg=15), _circulant_pair(m, 30), _circulant_pair(m, 30)]
    res = trim_super_regular(pairs, eps, beta)
    assert res.deleted_bad[0] == planted
    assert res.deleted_bad[1] == [] and res.deleted_bad[2] == []
    assert len(res.kept[0]) == m - 20
    fwd = pairs[0].left_degrees()
    assert all((beta - 2 * eps) * m < fwd[v] < (beta + 2 * eps) * m for v in res.kept[0])


def test_trim_too_many_bad():
    m, eps, beta = 100, 0.05, 0.3
    planted = set(range(0, 100, 4))
    pairs = [_circulant_pair(m, 30, low=planted, low_deg=5), _circulant_pair(m, 30)]
    with pytest.raises(TooManyBadVertices):
        trim_super_regular(pairs, eps, beta)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 4))
def test_trim_survivor_windows(seed, s):
    m, eps, beta = 60, 0.05, 0.3
    pairs = [random_super_regular_pair(m, beta, eps, seed=derive_seed(seed, t), switch_steps=200) for t in range(s)]
    res = trim_super_regular(pairs, eps, beta)
    for t in range(s):
        fwd = pairs[t].left_degrees()
        bwd = pairs[t - 1].right_degrees()
        assert len(res.kept[t]) == m - math.floor(4 * eps * m)
        for v in res.kept[t]:
            assert (beta - 2 * eps) * m < fwd[v] < (beta + 2 * eps) * m
            assert (beta - 2 * eps) * m < bwd[v] < (beta + 2 * eps) * m


def test_bounded_degree_on_complete():
    n = 40
    res = bounded_degree_subgraph(BipartitePair.complete(n), 1.0, seed=1)
    degs = res.pair.left_degrees() + res.pair.right_degrees()
    assert max(degs) <= n and res.pair.num_edges / n >= n / 8


def test_bounded_degree_first_try_rate():
    n = 300
    pair = random_pair(n, 0.5, 7)
    first = sum(bounded_degree_subgraph(pair, 0.1, seed=s).attempts == 1 for s in range(40))
    assert first >= 0.95 * 40


def test_bounded_degree_drops_heavy_vertex():
    m = 100
    pair = _circulant_pair(m, 5)
    rows = list(pair.rows)
    rows[0] = (1 << m) - 1
    heavy = BipartitePair(m, rows)
    res = bounded_degree_subgraph(heavy, 0.03, seed=2, max_attempts=200)
    assert res.dropped_left == [0]
    assert res.pair.rows[0] == 0


def test_bounded_degree_errors():
    with pytest.raises(InputError):
        bounded_degree_subgraph(BipartitePair(4, [0] * 4), 0.1, seed=0)
    star = BipartitePair(10, [(1 << 10) - 1] + [0] * 9)
    with pytest.raises(RetryBudgetExhausted):
        bounded_degree_subgraph(star, 0.1, seed=0, max_attempts=3)

import pytest
from hypothesis import given, settings, strategies as st

from hamdecomp.errors import HypothesisViolated, InputError, NoClosingEdge
from hamdecomp.factorizer import OneFactor, count_cycles
from hamdecomp.graph import Digraph
from hamdecomp.rng import make_rng
from hamdecomp.rotation import (
    MergeStats,
    ReserveGraph,
    audit_closing,
    audit_merge,
    close_path,
    hypothesis_rotation_instance,
    merge_cycles,
    random_rotation_instance,
    rotation_close,
)


def _path_digraph(path, extra=()):
    return Digraph.from_edges(len(path), list(zip(path, path[1:])) + list(extra))


def test_direct_closure():
    path = [0, 1, 2, 3]
    g = _path_digraph(path, [(3, 0)])
    closed = close_path(path, g.has_edge, [], [])
    assert closed.route == "direct" and closed.cycle == path and closed.new_edges == [(3, 0)]
    assert audit_closing(path, g, closed.cycle, [], []) == []


def test_three_edge_closure_by_hand():
    path = [0, 1, 2, 3, 4, 5]
    g = _path_digraph(path, [(3, 0), (5, 2), (1, 4)])
    closed = close_path(path, g.has_edge, [3], [2])
    assert closed.cycle == [0, 1, 4, 5, 2, 3]
    assert sorted(closed.removed_edges) == [(1, 2), (3, 4)]
    assert audit_closing(path, g, closed.cycle, [3], [2]) == []


def test_complete_between_classes_m12():
    inst = random_rotation_instance(12, 0.5, 0.25, 1.0, seed=1)
    inst.validate()
    closed = rotation_close(inst)
    assert len(set(closed.new_edges)) <= 5
    assert audit_closing(inst.path, inst.host, closed.cycle, inst.x_positions(), inst.y_positions()) == []


def test_too_few_x_positions():
    inst = random_rotation_instance(12, 0.5, 0.25, 0.05, seed=2)
    with pytest.raises(HypothesisViolated):
        rotation_close(inst)


def test_no_closing_edge():
    path = [0, 1, 2, 3]
    g = _path_digraph(path)
    with pytest.raises(NoClosingEdge):
        close_path(path, g.has_edge, [], [])


def test_positions_out_of_range():
    path = [0, 1, 2]
    g = _path_digraph(path)
    with pytest.raises(InputError):
        close_path(path, g.has_edge, [2], [1])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([16, 24, 32]), st.integers(0, 2**32))
def test_rotation_postconditions(m, seed):
    inst, _ = hypothesis_rotation_instance(m, 0.5, 0.25, 0.8, seed)
    closed = rotation_close(inst)
    assert audit_closing(inst.path, inst.host, closed.cycle, inst.x_positions(), inst.y_positions()) == []


def test_hypothesis_instances_satisfy_density():
    inst, tries = hypothesis_rotation_instance(16, 0.5, 0.25, 0.8, seed=3)
    assert tries >= 1
    assert inst.density_deficit() >= 0


# ------------------------------------------------------------------ merging


def test_merge_noop_on_single_cycle():
    f = OneFactor((1, 2, 3, 0))
    res = ReserveGraph(4, [(0, 2)])
    f2, r2 = merge_cycles(f, res, [0] * 4, cluster_succ={0: 0})
    assert f2 == f and r2.edges() == res.edges()


def test_merge_two_triangles():
    f = OneFactor((1, 2, 0, 4, 5, 3))
    res = ReserveGraph(6, [(2, 3), (5, 0)])
    stats = MergeStats()
    f2, r2 = merge_cycles(f, res, [0] * 6, cluster_succ={0: 0}, stats=stats)
    assert count_cycles(f2.successor) == 1
    # both reserve edges enter the factor and both displaced factor edges return
    assert stats.new_edges == stats.credited == 2
    assert sorted(r2.edges()) == [(2, 0), (5, 3)]
    assert audit_merge(f, f2, res, r2, [0] * 6) == []


def test_merge_red_edge_must_be_factor_edge():
    f = OneFactor((1, 2, 0, 4, 5, 3))
    with pytest.raises(InputError):
        merge_cycles(f, ReserveGraph(6), [0] * 6, red_edges=[(0, 2)], cluster_succ={0: 0})


def test_reserve_must_follow_cluster_cycle():
    f = OneFactor((1, 0, 3, 2))
    with pytest.raises(InputError):
        merge_cycles(f, ReserveGraph(4, [(0, 2)]), [0, 1, 0, 1])


def _blown_up_instance(seed, s=5, k=25, p=0.5):
    """Factor with ``k`` cycles along a blown-up ``s``-cycle plus a random reserve."""
    n = s * k
    rng = make_rng(seed)
    perms = [rng.permutation(k).tolist() for _ in range(s - 1)]
    comp = list(range(k))
    for perm in perms:
        comp = [perm[i] for i in comp]
    inv = [0] * k
    for i, j in enumerate(comp):
        inv[j] = i
    perms.append(inv)
    succ = [0] * n
    for t in range(s):
        for i in range(k):
            succ[t * k + i] = ((t + 1) % s) * k + perms[t][i]
    f = OneFactor(tuple(succ))
    edges = [(t * k + i, ((t + 1) % s) * k + j) for t in range(s) for i in range(k) for j in range(k)
             if succ[t * k + i] != ((t + 1) % s) * k + j and rng.random() < p]
    return f, ReserveGraph(n, edges), [v // k for v in range(n)]


def test_blown_up_cycle_merge():
    f, res, cl = _blown_up_instance(3)
    assert count_cycles(f.successor) == 25
    f2, r2 = merge_cycles(f, res, cl)
    assert count_cycles(f2.successor) <= 5
    assert audit_merge(f, f2, res, r2, cl) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_merge_conserves_edges_and_degrees(seed):
    f, res, cl = _blown_up_instance(seed, s=3, k=10, p=0.6)
    f2, r2 = merge_cycles(f, res, cl)
    assert audit_merge(f, f2, res, r2, cl) == []
    assert len(f.edges()) + res.num_edges == len(f2.edges()) + r2.num_edges
    assert sorted(f2.successor) == list(range(f.n))


def test_merge_keeps_red_edges():
    f, res, cl = _blown_up_instance(7, s=3, k=10, p=0.6)
    red = [(0, f.successor[0]), (5, f.successor[5])]
    f2, r2 = merge_cycles(f, res, cl, red_edges=red)
    assert all(f2.successor[u] == v for u, v in red)
    assert audit_merge(f, f2, res, r2, cl, red_edges=red) == []


def test_reserve_graph_bookkeeping():
    r = ReserveGraph(3, [(0, 1)])
    with pytest.raises(InputError):
        r.add(0, 1)
    with pytest.raises(InputError):
        r.add(2, 2)
    c = r.copy()
    c.remove(0, 1)
    assert r.has(0, 1) and not c.has(0, 1)
    assert r.min_semidegree([0]) == 0 and r.num_edges == 1

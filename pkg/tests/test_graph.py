import pytest
from hypothesis import given, settings, strategies as st

from hamdecomp.errors import (
    DuplicateOrAntiparallelEdge,
    EvenOrder,
    InfeasibleDegreeWindow,
    InputError,
    InvalidConnectionSet,
    SelfLoop,
    VertexOutOfRange,
)
from hamdecomp.graph import (
    CycleSet,
    Digraph,
    build_oriented,
    circulant_tournament,
    complete_digraph,
    degree_window,
    is_regular_tournament,
    is_tournament,
    random_almost_regular_oriented,
    random_regular_tournament,
    random_tournament,
    semidegrees,
)
from hamdecomp.textio import (
    format_factor,
    format_graph,
    format_multidigraph,
    format_partition,
    parse_factor,
    parse_graph,
    parse_multidigraph,
    parse_partition,
    read_graph,
    write_graph,
)


def test_triangle_semidegrees():
    g = build_oriented(3, [(0, 1), (1, 2), (2, 0)])
    prof = semidegrees(g)
    assert prof.out_degrees == (1, 1, 1) and prof.in_degrees == (1, 1, 1)
    assert is_regular_tournament(g)


def test_antiparallel_rejected():
    with pytest.raises(DuplicateOrAntiparallelEdge):
        build_oriented(2, [(0, 1), (1, 0)])


def test_bad_endpoints():
    with pytest.raises(SelfLoop):
        build_oriented(3, [(1, 1)])
    with pytest.raises(VertexOutOfRange):
        build_oriented(3, [(0, 3)])


def test_circulant_five():
    g = build_oriented(5, [(i, (i + s) % 5) for i in range(5) for s in (1, 2)])
    assert is_regular_tournament(g)
    assert semidegrees(g).min_semidegree == 2


@pytest.mark.parametrize("n,conn,deg", [(3, {1}, 1), (7, {1, 2, 3}, 3), (9, {1, 2, 3, 4}, 4)])
def test_circulant_regular(n, conn, deg):
    g = circulant_tournament(n, conn)
    assert is_regular_tournament(g)
    assert set(semidegrees(g).out_degrees) == {deg}


def test_circulant_errors():
    with pytest.raises(EvenOrder):
        circulant_tournament(6, {1})
    with pytest.raises(InvalidConnectionSet):
        circulant_tournament(7, {4})


def test_all_full_circulants_regular():
    for n in range(3, 202, 2):
        assert is_regular_tournament(circulant_tournament(n, range(1, (n - 1) // 2 + 1)))


def test_zero_mixing_returns_circulant():
    assert random_regular_tournament(5, 0, seed=3).out_rows == circulant_tournament(5, {1, 2}).out_rows


def test_mixing_keeps_regularity():
    g = random_regular_tournament(5, 10**4, seed=1)
    assert set(semidegrees(g).out_degrees) == {2} and is_regular_tournament(g)


def test_large_mixed_tournament():
    g = random_regular_tournament(101, 10**6, seed=5)
    prof = semidegrees(g)
    assert prof.min_semidegree == prof.max_semidegree == 50


def test_mixing_is_seeded():
    a = random_regular_tournament(21, seed=9)
    b = random_regular_tournament(21, seed=9)
    c = random_regular_tournament(21, seed=10)
    assert a.out_rows == b.out_rows and a.out_rows != c.out_rows


def test_almost_regular_window():
    g = random_almost_regular_oriented(200, 0.4, 0.02, seed=2)
    prof = semidegrees(g)
    assert degree_window(200, 0.4, 0.02) == (76, 84)
    assert 76 <= prof.min_semidegree and prof.max_semidegree <= 84
    assert g.is_oriented()


def test_almost_regular_collapsed_window_is_regular_tournament():
    g = random_almost_regular_oriented(11, 0.5 - 0.5 / 11, 0.0, seed=1)
    assert is_regular_tournament(g)


def test_almost_regular_empty_window():
    with pytest.raises(InfeasibleDegreeWindow):
        random_almost_regular_oriented(50, 0.45, 0.001, seed=0)


def test_almost_regular_parameter_check():
    with pytest.raises(InputError):
        random_almost_regular_oriented(50, 0.2, 0.01, seed=0)


def test_semidegrees_small_cases():
    assert set(semidegrees(circulant_tournament(7, {1, 2, 3})).in_degrees) == {3}
    prof = semidegrees(Digraph(4, [0, 0, 0, 0]))
    assert prof.out_degrees == (0,) * 4 and prof.in_degrees == (0,) * 4


def test_complete_digraph_and_tournament_checks():
    g = complete_digraph(4)
    assert g.num_edges == 12 and not g.is_oriented()
    t = random_tournament(9, seed=4)
    assert is_tournament(t) and t.num_edges == 36


def test_cycle_set_rejects_overlap():
    with pytest.raises(InputError):
        CycleSet(((0, 1), (1, 2)))


def test_without_edges():
    g = circulant_tournament(5, {1, 2})
    h = g.without_edges([(0, 1)])
    assert not h.has_edge(0, 1) and h.num_edges == 9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12).map(lambda k: 2 * k + 1), st.integers(0, 2**32))
def test_serialization_round_trip(n, seed):
    g = random_regular_tournament(n, mix_steps=5 * n, seed=seed)
    text = format_graph(g)
    assert text.endswith("\n") and "\r" not in text
    h = parse_graph(text)
    assert h.out_rows == g.out_rows


def test_file_round_trip(tmp_path):
    g = random_almost_regular_oriented(40, 0.4, 0.05, seed=1)
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert read_graph(path).out_rows == g.out_rows


def test_parse_comments_and_errors():
    g = parse_graph("# header\n3 3\n0 1 # first\n1 2\n2 0\n")
    assert g.num_edges == 3
    with pytest.raises(InputError):
        parse_graph("3 2\n0 1\n")
    with pytest.raises(InputError):
        parse_graph("")
    with pytest.raises(InputError):
        parse_graph("2 1\n0 x\n")
    assert parse_graph("2 2\n0 1\n1 0\n", oriented=False).num_edges == 2


def test_factor_partition_multidigraph_formats():
    succ = [1, 2, 0, 4, 3]
    assert parse_factor(format_factor(succ)) == succ
    with pytest.raises(InputError):
        parse_factor("2 2\n0 1\n1 1\n")
    clusters = [[0, 3], [1, 2]]
    assert parse_partition(format_partition(clusters)) == clusters
    mult = {(0, 1): 3, (1, 0): 1}
    L, back = parse_multidigraph(format_multidigraph(2, mult))
    assert L == 2 and back == mult

"""Directed graph model and generators.

Adjacency is stored as one Python int per vertex used as a bit-row, so edge
tests are a shift and a mask and neighbourhood intersections are a single
``&``.  Graphs are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    DuplicateOrAntiparallelEdge,
    EvenOrder,
    InfeasibleDegreeWindow,
    InputError,
    InvalidConnectionSet,
    SelfLoop,
    VertexOutOfRange,
)
from .rng import make_rng


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Digraph:
    """A simple digraph on vertices ``0..n-1`` (antiparallel pairs allowed)."""

    __slots__ = ("n", "out_rows", "in_rows", "_m")

    def __init__(self, n: int, out_rows: Sequence[int]):
        self.n = n
        self.out_rows = tuple(out_rows)
        ins = [0] * n
        m = 0
        for u, row in enumerate(self.out_rows):
            m += row.bit_count()
            for v in bits(row):
                ins[v] |= 1 << u
        self.in_rows = tuple(ins)
        self._m = m

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Digraph":
        rows = [0] * n
        for u, v in edges:
            _check_endpoints(n, u, v)
            if (rows[u] >> v) & 1:
                raise DuplicateOrAntiparallelEdge(f"duplicate edge ({u},{v})")
            rows[u] |= 1 << v
        return cls(n, rows)

    @property
    def num_edges(self) -> int:
        return self._m

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.out_rows[u] >> v) & 1)

    def out_neighbors(self, u: int) -> list[int]:
        return list(bits(self.out_rows[u]))

    def in_neighbors(self, v: int) -> list[int]:
        return list(bits(self.in_rows[v]))

    def out_degree(self, u: int) -> int:
        return self.out_rows[u].bit_count()

    def in_degree(self, v: int) -> int:
        return self.in_rows[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.out_rows[u])]

    def is_oriented(self) -> bool:
        return all(self.out_rows[u] & self.in_rows[u] == 0 for u in range(self.n))

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Digraph":
        rows = list(self.out_rows)
        for u, v in removed:
            rows[u] &= ~(1 << v)
        return type(self)(self.n, rows)

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.out_rows == other.out_rows

    def __hash__(self):
        return hash((self.n, self.out_rows))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={self.num_edges})"


class OrientedGraph(Digraph):
    """A digraph with at most one edge between any two vertices."""

    __slots__ = ()

    def __init__(self, n: int, out_rows: Sequence[int]):
        super().__init__(n, out_rows)
        for u in range(n):
            if (self.out_rows[u] >> u) & 1:
                raise SelfLoop(f"self-loop at {u}")
            both = self.out_rows[u] & self.in_rows[u]
            if both:
                v = next(bits(both))
                raise DuplicateOrAntiparallelEdge(f"antiparallel pair {u}<->{v}")


def _check_endpoints(n: int, u: int, v: int) -> None:
    if not (0 <= u < n and 0 <= v < n):
        raise VertexOutOfRange(f"edge ({u},{v}) outside [0,{n})")
    if u == v:
        raise SelfLoop(f"self-loop at {u}")


def build_oriented(n: int, edges: Iterable[tuple[int, int]]) -> OrientedGraph:
    rows = [0] * n
    for u, v in edges:
        _check_endpoints(n, u, v)
        if (rows[u] >> v) & 1 or (rows[v] >> u) & 1:
            raise DuplicateOrAntiparallelEdge(f"edge ({u},{v}) repeats a pair")
        rows[u] |= 1 << v
    return OrientedGraph(n, rows)


def is_tournament(g: Digraph) -> bool:
    return g.is_oriented() and g.num_edges == g.n * (g.n - 1) // 2


def is_regular_tournament(g: Digraph) -> bool:
    if g.n % 2 == 0 or not is_tournament(g):
        return False
    k = (g.n - 1) // 2
    return all(g.out_degree(v) == k and g.in_degree(v) == k for v in range(g.n))


@dataclass(frozen=True)
class SemidegreeProfile:
    out_degrees: tuple[int, ...]
    in_degrees: tuple[int, ...]

    @property
    def min_semidegree(self) -> int:
        if not self.out_degrees:
            return 0
        return min(min(self.out_degrees), min(self.in_degrees))

    @property
    def max_semidegree(self) -> int:
        if not self.out_degrees:
            return 0
        return max(max(self.out_degrees), max(self.in_degrees))

    @property
    def edge_count(self) -> int:
        return sum(self.out_degrees)

    def is_regular(self) -> bool:
        return self.min_semidegree == self.max_semidegree


def semidegrees(g: Digraph) -> SemidegreeProfile:
    return SemidegreeProfile(
        tuple(g.out_degree(v) for v in range(g.n)),
        tuple(g.in_degree(v) for v in range(g.n)),
    )


@dataclass(frozen=True)
class CycleSet:
    """Vertex-disjoint directed cycles, each listed as a vertex sequence."""

    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for c in self.cycles:
            if len(c) < 1:
                raise InputError("empty cycle")
            for v in c:
                if v in seen:
                    raise InputError(f"vertex {v} lies on two cycles")
                seen.add(v)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(v for c in self.cycles for v in c)

    def __len__(self):
        return len(self.cycles)

    def edges(self) -> list[tuple[int, int]]:
        return [(c[i], c[(i + 1) % len(c)]) for c in self.cycles for i in range(len(c))]


# ---------------------------------------------------------------- generators


def circulant_tournament(n: int, connection_set: Iterable[int]) -> OrientedGraph:
    if n % 2 == 0:
        raise EvenOrder(f"circulant tournament needs odd n, got {n}")
    conn = sorted(set(connection_set))
    half = (n - 1) // 2
    if any(not (1 <= s <= half) for s in conn):
        raise InvalidConnectionSet(f"connection set must lie in 1..{half}")
    rows = []
    for i in range(n):
        row = 0
        for s in conn:
            row |= 1 << ((i + s) % n)
        rows.append(row)
    return OrientedGraph(n, rows)


def _matrix_to_graph(adj: list[bytearray]) -> OrientedGraph:
    n = len(adj)
    table = bytes.maketrans(b"\x00\x01", b"01")
    rows = [int(bytes(reversed(r)).translate(table), 2) if n else 0 for r in adj]
    return OrientedGraph(n, rows)


def _graph_to_matrix(g: Digraph) -> list[bytearray]:
    adj = [bytearray(g.n) for _ in range(g.n)]
    for u, v in g.edges():
        adj[u][v] = 1
    return adj


def random_regular_tournament(n: int, mix_steps: int | None = None, seed: int = 0) -> OrientedGraph:
    """Circulant start followed by ``mix_steps`` random directed-triangle reversals.

    Reversing a directed triangle keeps every semidegree, so the output is
    regular whatever the number of steps.  Defaults to ``20 n^2`` reversals.
    """
    if n % 2 == 0:
        raise EvenOrder(f"regular tournaments need odd n, got {n}")
    if n < 3:
        raise EvenOrder("regular tournament needs n >= 3")
    if mix_steps is None:
        mix_steps = 20 * n * n
    g = circulant_tournament(n, range(1, (n - 1) // 2 + 1))
    if mix_steps <= 0:
        return g
    adj = _graph_to_matrix(g)
    rng = make_rng(seed, 11)
    done = 0
    while done < mix_steps:
        batch = rng.integers(0, n, size=(max(1024, 4 * (mix_steps - done)), 3)).tolist()
        for a, b, c in batch:
            if a == b or b == c or a == c:
                continue
            ra, rb, rc = adj[a], adj[b], adj[c]
            if ra[b] and rb[c] and rc[a]:
                ra[b] = rb[c] = rc[a] = 0
                rb[a] = rc[b] = ra[c] = 1
            elif ra[c] and rc[b] and rb[a]:
                ra[c] = rc[b] = rb[a] = 0
                rc[a] = rb[c] = ra[b] = 1
            else:
                continue
            done += 1
            if done == mix_steps:
                break
    return _matrix_to_graph(adj)


def degree_window(n: int, alpha: float, eta: float) -> tuple[int, int]:
    """Integer semidegree window ``[ceil((a-e)n), floor((a+e)n)]``."""
    lo = math.ceil((alpha - eta) * n - 1e-9)
    hi = math.floor((alpha + eta) * n + 1e-9)
    return max(lo, 0), hi


def random_almost_regular_oriented(n: int, alpha: float, eta: float, seed: int = 0,
                                   repair_budget: int | None = None) -> OrientedGraph:
    """Oriented graph with every semidegree in ``[(alpha-eta)n, (alpha+eta)n]``.

    Each pair becomes an edge with probability ``2 alpha`` and a uniform
    orientation; vertices outside the window are then repaired greedily by
    adding, deleting or reversing single edges, at most ``50 n`` times.
    """
    if not (0.25 < alpha < 0.5) or not (0 <= eta < alpha):
        raise InputError("need 1/4 < alpha < 1/2 and 0 <= eta < alpha")
    lo, hi = degree_window(n, alpha, eta)
    if lo > hi or 2 * lo > n - 1:
        raise InfeasibleDegreeWindow(f"window [{lo},{hi}] admits no oriented graph on {n} vertices")
    half = (n - 1) // 2
    if n % 2 == 1 and lo == hi == half:
        return random_regular_tournament(n, seed=seed)
    if repair_budget is None:
        repair_budget = 50 * n
    rng = make_rng(seed, 12)
    adj = [bytearray(n) for _ in range(n)]
    outd = [0] * n
    ind = [0] * n
    coins = rng.random((n, n)).tolist()
    flips = rng.random((n, n)).tolist()
    for u in range(n):
        for v in range(u + 1, n):
            if coins[u][v] < 2 * alpha:
                a, b = (u, v) if flips[u][v] < 0.5 else (v, u)
                adj[a][b] = 1
                outd[a] += 1
                ind[b] += 1

    def pen(d: int) -> int:
        return (lo - d if d < lo else 0) + (d - hi if d > hi else 0)

    def violation(v: int) -> int:
        return pen(outd[v]) + pen(ind[v])

    def delta(changes):
        # changes: list of (degree list, vertex, +/-1)
        before = after = 0
        for arr, v, dv in changes:
            before += pen(arr[v])
            after += pen(arr[v] + dv)
        return after - before

    for _ in range(repair_budget):
        viol = [violation(v) for v in range(n)]
        worst = max(range(n), key=lambda v: (viol[v], -v))
        if viol[worst] == 0:
            return _matrix_to_graph(adj)
        v = worst
        best = None
        for w in rng.permutation(n).tolist():
            if w == v:
                continue
            moves = []
            if adj[v][w]:
                moves.append((("del", v, w), [(outd, v, -1), (ind, w, -1)]))
                moves.append((("rev", v, w), [(outd, v, -1), (ind, w, -1), (outd, w, 1), (ind, v, 1)]))
            elif adj[w][v]:
                moves.append((("del", w, v), [(outd, w, -1), (ind, v, -1)]))
                moves.append((("rev", w, v), [(outd, w, -1), (ind, v, -1), (outd, v, 1), (ind, w, 1)]))
            else:
                moves.append((("add", v, w), [(outd, v, 1), (ind, w, 1)]))
                moves.append((("add", w, v), [(outd, w, 1), (ind, v, 1)]))
            for move, ch in moves:
                d = delta(ch)
                if best is None or d < best[0]:
                    best = (d, move)
        if best is None or best[0] >= 0:
            break
        kind, a, b = best[1]
        if kind == "del":
            adj[a][b] = 0
            outd[a] -= 1
            ind[b] -= 1
        elif kind == "add":
            adj[a][b] = 1
            outd[a] += 1
            ind[b] += 1
        else:
            adj[a][b] = 0
            adj[b][a] = 1
            outd[a] -= 1
            ind[b] -= 1
            outd[b] += 1
            ind[a] += 1
    if all(violation(v) == 0 for v in range(n)):
        return _matrix_to_graph(adj)
    raise InfeasibleDegreeWindow(
        f"repair left vertices outside [{lo},{hi}] after {repair_budget} toggles")


def complete_digraph(n: int) -> Digraph:
    full = (1 << n) - 1
    return Digraph(n, [full & ~(1 << u) for u in range(n)])


def random_tournament(n: int, seed: int = 0) -> OrientedGraph:
    """Every pair oriented by an independent fair coin."""
    rng = make_rng(seed, 13)
    coins = rng.integers(0, 2, size=n * (n - 1) // 2).tolist() if n > 1 else []
    rows = [0] * n
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            if coins[k]:
                rows[u] |= 1 << v
            else:
                rows[v] |= 1 << u
            k += 1
    return OrientedGraph(n, rows)

"""1-factors of regular digraphs via perfect matchings in the double cover."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    HypothesisViolated,
    InputError,
    NoPerfectMatching,
    NotRegular,
    ResampleBudgetExhausted,
)
from .graph import CycleSet, Digraph, bits, semidegrees
from .rng import derive_seed, make_rng


class BipartiteGraph:
    """Left vertices ``0..n_left-1``, right vertices ``0..n_right-1``.

    ``rows[x]`` is a bitmask of the right neighbours of left vertex ``x``.
    """

    __slots__ = ("n_left", "n_right", "rows", "adj")

    def __init__(self, n_left: int, n_right: int, rows: Sequence[int]):
        self.n_left = n_left
        self.n_right = n_right
        self.rows = list(rows)
        self.adj = [list(bits(r)) for r in self.rows]

    @classmethod
    def from_edges(cls, n_left, n_right, edges):
        rows = [0] * n_left
        for x, y in edges:
            if not (0 <= x < n_left and 0 <= y < n_right):
                raise InputError(f"edge ({x},{y}) out of range")
            rows[x] |= 1 << y
        return cls(n_left, n_right, rows)

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def has_edge(self, x: int, y: int) -> bool:
        return bool((self.rows[x] >> y) & 1)

    def left_degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def right_degrees(self) -> list[int]:
        deg = [0] * self.n_right
        for nbrs in self.adj:
            for y in nbrs:
                deg[y] += 1
        return deg

    def edges(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.n_left) for y in self.adj[x]]


def double_cover(g: Digraph) -> BipartiteGraph:
    """Left copy ``x`` joined to right copy ``y`` whenever ``x -> y`` in ``g``."""
    return BipartiteGraph(g.n, g.n, g.out_rows)


def maximum_matching(b: BipartiteGraph) -> list[int]:
    """Hopcroft-Karp; returns ``match_left`` with -1 for unmatched vertices.

    Neighbours are scanned in ascending order, so among augmenting paths of
    a phase the lowest-index one is taken first.
    """
    nl, nr = b.n_left, b.n_right
    adj = b.adj
    ml = [-1] * nl
    mr = [-1] * nr
    INF = nl + nr + 1
    while True:
        dist = [INF] * nl
        q = deque()
        for x in range(nl):
            if ml[x] == -1:
                dist[x] = 0
                q.append(x)
        reachable_free = INF
        while q:
            x = q.popleft()
            if dist[x] >= reachable_free:
                continue
            for y in adj[x]:
                x2 = mr[y]
                if x2 == -1:
                    if reachable_free == INF:
                        reachable_free = dist[x] + 1
                elif dist[x2] == INF:
                    dist[x2] = dist[x] + 1
                    q.append(x2)
        if reachable_free == INF:
            break
        ptr = [0] * nl
        augmented = False
        for root in range(nl):
            if ml[root] != -1:
                continue
            # iterative DFS along the layered graph
            stack = [root]
            path_y: list[int] = []
            while stack:
                x = stack[-1]
                found = False
                nbrs = adj[x]
                while ptr[x] < len(nbrs):
                    y = nbrs[ptr[x]]
                    ptr[x] += 1
                    x2 = mr[y]
                    if x2 == -1:
                        if dist[x] + 1 == reachable_free:
                            path_y.append(y)
                            found = True
                            break
                    elif dist[x2] == dist[x] + 1:
                        path_y.append(y)
                        stack.append(x2)
                        break
                else:
                    dist[x] = INF
                    stack.pop()
                    if path_y:
                        path_y.pop()
                    continue
                if found:
                    for xx, yy in zip(stack, path_y):
                        ml[xx] = yy
                        mr[yy] = xx
                    augmented = True
                    break
        if not augmented:
            break
    return ml


def perfect_matching(b: BipartiteGraph) -> list[int] | None:
    if b.n_left != b.n_right:
        return None
    ml = maximum_matching(b)
    return None if -1 in ml else ml


def default_chain_steps(num_edges: int) -> int:
    if num_edges < 2:
        return 0
    return int(10 * num_edges * math.log(num_edges))


def sample_matching(b: BipartiteGraph, steps: int | None = None, seed: int = 0,
                    initial: Sequence[int] | None = None) -> list[int]:
    """Run the switch chain on perfect matchings for ``steps`` transitions.

    A step picks two matched pairs ``(x1,y1), (x2,y2)``; if the crossing
    edges exist it swaps partners with probability 1/2.
    """
    if initial is None:
        initial = perfect_matching(b)
        if initial is None:
            raise NoPerfectMatching("the bipartite graph has no perfect matching")
    ml = list(initial)
    n = len(ml)
    if steps is None:
        steps = default_chain_steps(b.num_edges)
    if n < 2 or steps <= 0:
        return ml
    rng = make_rng(seed, 21)
    rows = b.rows
    done = 0
    while done < steps:
        chunk = min(steps - done, 1 << 16)
        pick = rng.integers(0, n, size=(chunk, 2)).tolist()
        coin = rng.integers(0, 2, size=chunk).tolist()
        for (x1, x2), c in zip(pick, coin):
            if c and x1 != x2:
                y1 = ml[x1]
                y2 = ml[x2]
                if (rows[x1] >> y2) & 1 and (rows[x2] >> y1) & 1:
                    ml[x1] = y2
                    ml[x2] = y1
        done += chunk
    return ml


@dataclass(frozen=True)
class OneFactor:
    """A successor permutation; ``successor[x]`` is the vertex after ``x``."""

    successor: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.successor) != list(range(len(self.successor))):
            raise InputError("successor map is not a permutation")

    @property
    def n(self) -> int:
        return len(self.successor)

    def edges(self) -> list[tuple[int, int]]:
        return list(enumerate(self.successor))

    def predecessor(self) -> list[int]:
        pred = [0] * self.n
        for x, y in enumerate(self.successor):
            pred[y] = x
        return pred

    def is_factor_of(self, g: Digraph) -> bool:
        return all(g.has_edge(x, y) for x, y in enumerate(self.successor))


def cycle_structure(f: OneFactor | Sequence[int]) -> CycleSet:
    succ = f.successor if isinstance(f, OneFactor) else f
    seen = [False] * len(succ)
    cycles = []
    for start in range(len(succ)):
        if seen[start]:
            continue
        cyc = []
        v = start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = succ[v]
        cycles.append(tuple(cyc))
    return CycleSet(tuple(cycles))


def count_cycles(succ: Sequence[int]) -> int:
    seen = bytearray(len(succ))
    count = 0
    for start in range(len(succ)):
        if not seen[start]:
            count += 1
            v = start
            while not seen[v]:
                seen[v] = 1
                v = succ[v]
    return count


def _require_regular(g: Digraph) -> int:
    prof = semidegrees(g)
    if not prof.is_regular():
        raise NotRegular(f"semidegrees range over [{prof.min_semidegree},{prof.max_semidegree}]")
    return prof.min_semidegree


def one_factorization(g: Digraph) -> list[OneFactor]:
    """Split a regular digraph into edge-disjoint 1-factors."""
    rho = _require_regular(g)
    rows = list(g.out_rows)
    factors = []
    for _ in range(rho):
        ml = perfect_matching(BipartiteGraph(g.n, g.n, rows))
        if ml is None:  # impossible for a regular bipartite graph
            raise NoPerfectMatching("residual cover lost its perfect matching")
        for x, y in enumerate(ml):
            rows[x] &= ~(1 << y)
        factors.append(OneFactor(tuple(ml)))
    return factors


def default_cycle_cap(n: int) -> int:
    if n < 2:
        return 1
    return max(1, math.ceil(n / math.log2(n) ** 0.2))


@dataclass(frozen=True)
class FewCycleParams:
    theta1: float = 0.1
    theta2: float = 0.2
    theta3: float = 0.25
    cycle_cap: int | None = None
    sets: tuple[tuple[int, ...], ...] = ()
    max_resamples: int = 200
    chain_steps: int | None = None

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            val = getattr(self, name)
            if not (0 < val < 0.5):
                raise InputError(f"{name} must lie in (0, 1/2)")
        if self.max_resamples < 1:
            raise InputError("max_resamples must be positive")


def _forbidden_incidences(succ, h_rows, subset) -> int:
    members = set(subset)
    count = 0
    for x, y in enumerate(succ):
        if (h_rows[x] >> y) & 1 and (x in members or y in members):
            count += 1
    return count


def few_cycle_one_factor(g: Digraph, h: Digraph | None, p: FewCycleParams, seed: int,
                         stats: dict | None = None) -> OneFactor:
    """Rejection-sample a 1-factor with few cycles and few edges of ``h`` near each set."""
    _require_regular(g)
    n = g.n
    h_rows = h.out_rows if h is not None else (0,) * n
    if h is not None:
        for x, y in h.edges():
            if not g.has_edge(x, y):
                raise InputError("h must be a subgraph of g")
        limit = p.theta1 * n
        for subset in p.sets:
            for x in subset:
                if h.out_degree(x) > limit or h.in_degree(x) > limit:
                    raise HypothesisViolated(f"vertex {x} has h-degree above theta1*n")
    cap = p.cycle_cap if p.cycle_cap is not None else default_cycle_cap(n)
    cover = double_cover(g)
    start = perfect_matching(cover)
    if start is None:
        raise NoPerfectMatching("regular digraph without 1-factor")
    steps = p.chain_steps if p.chain_steps is not None else default_chain_steps(cover.num_edges)
    for attempt in range(p.max_resamples):
        succ = sample_matching(cover, steps, derive_seed(seed, attempt), initial=start)
        if count_cycles(succ) > cap:
            continue
        if any(_forbidden_incidences(succ, h_rows, s) > p.theta2 * len(s) for s in p.sets):
            continue
        if stats is not None:
            stats["resamples"] = stats.get("resamples", 0) + attempt
        return OneFactor(tuple(succ))
    if stats is not None:
        stats["resamples"] = stats.get("resamples", 0) + p.max_resamples
    raise ResampleBudgetExhausted(f"no acceptable factor in {p.max_resamples} samples")

"""Exact small-instance oracles: permanents, Hamilton cycles and decompositions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, TooLarge, Unsupported
from .factorizer import BipartiteGraph, double_cover
from .graph import Digraph, OrientedGraph, bits, complete_digraph

PERMANENT_CAP = 14
HELD_KARP_CAP = 20


# ---------------------------------------------------------------- permanents


def _square_rows(b: BipartiteGraph | Sequence[int], n: int | None = None) -> tuple[list[int], int]:
    if isinstance(b, BipartiteGraph):
        if b.n_left != b.n_right:
            raise InputError("classes must have equal size")
        return list(b.rows), b.n_left
    rows = list(b)
    return rows, len(rows) if n is None else n


def exact_matching_count(b: BipartiteGraph | Sequence[int]) -> int:
    """Number of perfect matchings: Ryser's formula walked in Gray-code order."""
    rows, n = _square_rows(b)
    if n > PERMANENT_CAP:
        raise TooLarge(f"permanent cap is n <= {PERMANENT_CAP}, got {n}")
    if n == 0:
        return 1
    # column j as a 0/1 vector over rows
    cols = [[(rows[i] >> j) & 1 for i in range(n)] for j in range(n)]
    sums = [0] * n
    total = 0
    subset = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        col = cols[j]
        if (subset >> j) & 1:
            subset &= ~(1 << j)
            for i in range(n):
                sums[i] -= col[i]
        else:
            subset |= 1 << j
            for i in range(n):
                sums[i] += col[i]
        prod = 1
        for s in sums:
            if s == 0:
                prod = 0
                break
            prod *= s
        if prod:
            total += -prod if subset.bit_count() & 1 else prod
    return -total if n & 1 else total


def permanent_by_permutations(rows: Sequence[int], n: int | None = None) -> int:
    """Count perfect matchings by scanning all ``n!`` permutations."""
    n = len(rows) if n is None else n
    return sum(1 for p in itertools.permutations(range(n)) if all((rows[i] >> p[i]) & 1 for i in range(n)))


def log_bregman_bound(degrees: Sequence[int]) -> float:
    if any(d <= 0 for d in degrees):
        return -math.inf
    return math.fsum(math.lgamma(d + 1) / d for d in degrees)


def bregman_bound(degrees: Sequence[int]) -> float:
    """Upper bound ``prod (d_k!)^(1/d_k)``; zero as soon as some degree is zero."""
    if any(d < 0 for d in degrees):
        raise InputError("degrees must be non-negative")
    if any(d == 0 for d in degrees):
        return 0.0
    return math.exp(log_bregman_bound(degrees))


def log_vdw_lower_bound(rho: int, n: int) -> float:
    if not 1 <= rho <= n:
        raise InputError("need 1 <= rho <= n")
    return math.fsum([n * math.log(rho / n), math.lgamma(n + 1)])


def vdw_lower_bound(rho: int, n: int) -> float:
    """Lower bound ``(rho/n)^n n!`` for a rho-regular bipartite graph."""
    return math.exp(log_vdw_lower_bound(rho, n))


@dataclass
class MatchingCountBounds:
    degrees: list[int]
    bregman_upper: float
    exact: int | None = None
    vdw_lower: float | None = None
    rho: int | None = None

    def sandwich_holds(self, rel_tol: float = 1e-9) -> bool:
        if self.exact is None:
            return self.vdw_lower is None or self.vdw_lower <= self.bregman_upper * (1 + rel_tol)
        ok = self.exact <= self.bregman_upper * (1 + rel_tol)
        if self.vdw_lower is not None:
            ok = ok and self.vdw_lower <= self.exact * (1 + rel_tol)
        return ok


def matching_count_bounds(b: BipartiteGraph) -> MatchingCountBounds:
    degrees = b.left_degrees()
    right = b.right_degrees()
    out = MatchingCountBounds(degrees, bregman_bound(degrees))
    if b.n_left == b.n_right and b.n_left <= PERMANENT_CAP:
        out.exact = exact_matching_count(b)
    if b.n_left == b.n_right and len(set(degrees) | set(right)) == 1 and degrees and degrees[0] >= 1:
        out.rho = degrees[0]
        out.vdw_lower = vdw_lower_bound(out.rho, b.n_left)
    return out


def random_regular_bipartite(n: int, rho: int, rng: np.random.Generator) -> BipartiteGraph:
    """Random ``rho``-regular bipartite graph on ``n + n`` vertices.

    Left ``i`` starts joined to right ``pi(sigma(i) + s)`` for a random
    ``rho``-set of shifts ``s``; degree-preserving switches then mix it.
    """
    if not 0 <= rho <= n:
        raise InputError("need 0 <= rho <= n")
    shifts = rng.choice(n, size=rho, replace=False).tolist()
    sigma = rng.permutation(n).tolist()
    pi = rng.permutation(n).tolist()
    rows = [sum(1 << pi[(sigma[i] + s) % n] for s in shifts) for i in range(n)]
    edges = [(x, y) for x in range(n) for y in bits(rows[x])]
    if len(edges) > 1:
        for e1, e2 in rng.integers(0, len(edges), size=(10 * len(edges), 2)).tolist():
            (x1, y1), (x2, y2) = edges[e1], edges[e2]
            if x1 == x2 or y1 == y2 or (rows[x1] >> y2) & 1 or (rows[x2] >> y1) & 1:
                continue
            rows[x1] ^= (1 << y1) | (1 << y2)
            rows[x2] ^= (1 << y1) | (1 << y2)
            edges[e1], edges[e2] = (x1, y2), (x2, y1)
    return BipartiteGraph(n, n, rows)


# ---------------------------------------------------------------- Hamilton cycles


def hamilton_cycle_exists(g: Digraph) -> bool:
    """Held-Karp reachability over (visited set, endpoint), anchored at vertex 0."""
    n = g.n
    if n > HELD_KARP_CAP:
        raise TooLarge(f"Held-Karp cap is n <= {HELD_KARP_CAP}, got {n}")
    if n <= 1:
        return n == 1 and g.has_edge(0, 0)
    k = n - 1  # vertices 1..n-1 are tracked by bits 0..k-1
    size = 1 << k
    dp = np.zeros(size, dtype=np.int64)
    inpred = [sum(1 << v for v in g.in_neighbors(w)) for w in range(n)]
    idx = np.arange(size, dtype=np.int64)
    pc = np.zeros(size, dtype=np.int64)
    for b in range(k):
        pc += (idx >> b) & 1
    dp[0] = 1  # path consisting of vertex 0 alone
    for layer in range(k):
        masks = idx[pc == layer]
        live = masks[dp[masks] != 0]
        if live.size == 0:
            return False
        ends = dp[live]
        for w in range(1, n):
            bit = 1 << (w - 1)
            sel = ((live & bit) == 0) & ((ends & inpred[w]) != 0)
            if sel.any():
                tgt = live[sel] | bit
                dp[tgt] |= 1 << w
    closers = sum(1 << v for v in g.in_neighbors(0))
    return bool(int(dp[size - 1]) & closers)


def is_strongly_connected(g: Digraph) -> bool:
    n = g.n
    if n == 0:
        return True

    def reach(rows):
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= rows[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen

    full = (1 << n) - 1
    return reach(g.out_rows) == full and reach(g.in_rows) == full


def hamilton_cycles(g: Digraph) -> list[tuple[int, ...]]:
    """All Hamilton cycles as vertex tuples starting at 0, in lexicographic order."""
    n = g.n
    if n == 0:
        return []
    if n == 1:
        return [(0,)] if g.has_edge(0, 0) else []
    out = []
    adj = [sorted(bits(r)) for r in g.out_rows]
    path = [0]
    stack = [iter(adj[0])]
    visited = 1
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            v = path.pop()
            visited &= ~(1 << v)
            continue
        if (visited >> nxt) & 1:
            continue
        path.append(nxt)
        visited |= 1 << nxt
        if len(path) == n:
            if g.has_edge(nxt, 0):
                out.append(tuple(path))
            path.pop()
            visited &= ~(1 << nxt)
            continue
        stack.append(iter(adj[nxt]))
    return out


def _cycle_mask(cyc: Sequence[int], n: int) -> int:
    m = 0
    for i in range(len(cyc)):
        m |= 1 << (cyc[i] * n + cyc[(i + 1) % len(cyc)])
    return m


def _exact_cover(cycles: list[tuple[int, ...]], n: int, target: int) -> list[tuple[int, ...]] | None:
    """First set of cycles (in list order) partitioning the edge set ``target``."""
    masks = [_cycle_mask(c, n) for c in cycles]
    by_edge: dict[int, list[int]] = {}
    for i, m in enumerate(masks):
        for e in bits(m):
            by_edge.setdefault(e, []).append(i)
    chosen: list[int] = []

    def solve(covered: int) -> bool:
        rest = target & ~covered
        if rest == 0:
            return True
        e = (rest & -rest).bit_length() - 1
        for i in by_edge.get(e, ()):
            m = masks[i]
            if m & covered == 0:
                chosen.append(i)
                if solve(covered | m):
                    return True
                chosen.pop()
        return False

    if solve(0):
        return [cycles[i] for i in sorted(chosen)]
    return None


def _all_edges_mask(g: Digraph) -> int:
    return sum(1 << (u * g.n + v) for u, v in g.edges())


def exhaustive_hamilton_decomposition(t: Digraph) -> list[tuple[int, ...]] | None:
    """Hamilton decomposition of a regular tournament on at most 9 vertices, or None."""
    n = t.n
    if n > 9:
        raise TooLarge(f"exhaustive decomposition supports n <= 9, got {n}")
    if n % 2 == 0:
        raise InputError("a regular tournament has odd order")
    if n == 1:
        return []
    return _exact_cover(hamilton_cycles(t), n, _all_edges_mask(t))


def complete_digraph_decomposition(n: int) -> list[tuple[int, ...]] | None:
    """Hamilton decomposition of the complete digraph on ``n <= 7`` vertices, or None."""
    if n > 7:
        raise TooLarge(f"complete digraph search supports n <= 7, got {n}")
    if n < 1:
        raise InputError("n must be positive")
    if n == 1:
        return []
    g = complete_digraph(n)
    return _exact_cover(hamilton_cycles(g), n, _all_edges_mask(g))


def max_edge_disjoint_hamilton_cycles(t: Digraph) -> tuple[int, list[tuple[int, ...]]]:
    """Largest packing of edge-disjoint Hamilton cycles, by branch and bound."""
    n = t.n
    if n > 7:
        raise TooLarge(f"packing search supports n <= 7, got {n}")
    cycles = hamilton_cycles(t)
    masks = [_cycle_mask(c, n) for c in cycles]
    ceiling = t.num_edges // n if n else 0
    best: list[int] = []
    cur: list[int] = []

    def go(i: int, used: int) -> None:
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
        if len(best) == ceiling:
            return
        free_edges = (t.num_edges - used.bit_count()) // n
        if len(cur) + min(free_edges, len(cycles) - i) <= len(best):
            return
        for j in range(i, len(cycles)):
            if masks[j] & used == 0:
                cur.append(j)
                go(j + 1, used | masks[j])
                cur.pop()
                if len(best) == ceiling:
                    return

    go(0, 0)
    return len(best), [cycles[j] for j in best]


# ---------------------------------------------------------------- enumeration


def enumerate_regular_tournaments(n: int, allow_nine: bool = False) -> list[OrientedGraph]:
    """All labelled regular tournaments on ``n`` vertices, by pair-orientation backtracking."""
    if n not in (3, 5, 7) and not (n == 9 and allow_nine) and n != 1:
        raise Unsupported(f"enumeration supports n in {{3, 5, 7}} (9 on request), got {n}")
    half = (n - 1) // 2
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    # last pair index touching each vertex, for exact-degree pruning
    last = [max(p for p, (i, j) in enumerate(pairs) if v in (i, j)) if n > 1 else -1 for v in range(n)]
    outd = [0] * n
    ind = [0] * n
    rows = [0] * n
    found: list[OrientedGraph] = []

    def done_at(p, v):
        return last[v] == p

    def rec(p: int) -> None:
        if p == len(pairs):
            found.append(OrientedGraph(n, rows))
            return
        i, j = pairs[p]
        for u, v in ((i, j), (j, i)):
            if outd[u] < half and ind[v] < half:
                outd[u] += 1
                ind[v] += 1
                rows[u] |= 1 << v
                if not ((done_at(p, i) and outd[i] != half) or (done_at(p, j) and outd[j] != half)):
                    rec(p + 1)
                rows[u] &= ~(1 << v)
                outd[u] -= 1
                ind[v] -= 1

    rec(0)
    return found


def count_regular_tournaments_by_scan(n: int) -> int:
    """Count labelled regular tournaments by testing all ``2^C(n,2)`` orientation codes."""
    if n not in (1, 3, 5, 7):
        raise Unsupported(f"scan supports n in {{1, 3, 5, 7}}, got {n}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    codes = np.arange(1 << len(pairs), dtype=np.uint32)
    outd = np.zeros((n, codes.size), dtype=np.uint8)
    for p, (i, j) in enumerate(pairs):
        bit = ((codes >> np.uint32(p)) & np.uint32(1)).astype(np.uint8)
        outd[i] += bit
        outd[j] += 1 - bit
    return int(np.all(outd == (n - 1) // 2, axis=0).sum())


def kelly_check(n: int) -> tuple[int, int]:
    """(regular tournaments enumerated, how many of them decompose)."""
    ts = enumerate_regular_tournaments(n)
    ok = sum(1 for t in ts if exhaustive_hamilton_decomposition(t) is not None)
    return len(ts), ok


__all__ = [
    "exact_matching_count", "permanent_by_permutations", "bregman_bound", "vdw_lower_bound",
    "log_bregman_bound", "log_vdw_lower_bound", "MatchingCountBounds", "matching_count_bounds",
    "hamilton_cycle_exists", "is_strongly_connected", "hamilton_cycles",
    "exhaustive_hamilton_decomposition", "complete_digraph_decomposition",
    "max_edge_disjoint_hamilton_cycles", "enumerate_regular_tournaments",
    "count_regular_tournaments_by_scan", "kelly_check", "double_cover",
]

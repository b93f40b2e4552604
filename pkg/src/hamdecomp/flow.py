"""Integral max-flow (Dinic) and degree-prescribed subgraphs of bipartite pairs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    InputError,
    PairInfeasible,
    PrescriptionUnbalanced,
    UnbalancedRedEdges,
)
from .graph import Digraph, bits
from .rng import make_rng


class FlowNetwork:
    """Residual network with paired arcs: arc ``2k`` is forward, ``2k+1`` its reverse."""

    def __init__(self, num_nodes: int, source: int, sink: int):
        if source == sink:
            raise InputError("source and sink must differ")
        self.num_nodes = num_nodes
        self.source = source
        self.sink = sink
        self.head: list[int] = []
        self.cap: list[int] = []
        self.out: list[list[int]] = [[] for _ in range(num_nodes)]

    def add_arc(self, u: int, v: int, capacity: int) -> int:
        if capacity < 0 or int(capacity) != capacity:
            raise InputError("capacities must be non-negative integers")
        if v == self.source or u == self.sink:
            raise InputError("no arc may enter the source or leave the sink")
        k = len(self.head)
        self.head += [v, u]
        self.cap += [int(capacity), 0]
        self.out[u].append(k)
        self.out[v].append(k + 1)
        return k

    @property
    def num_arcs(self) -> int:
        return len(self.head) // 2

    def arc_tail(self, k: int) -> int:
        return self.head[k ^ 1]


@dataclass
class FlowResult:
    value: int
    arc_flows: list[int]
    source_side: list[bool] = field(default_factory=list)


def max_flow(net: FlowNetwork) -> FlowResult:
    """Dinic's layered blocking-flow method; the input network is not modified."""
    head = net.head
    res = list(net.cap)
    out = net.out
    s, t = net.source, net.sink
    N = net.num_nodes
    total = 0
    while True:
        level = [-1] * N
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            lu = level[u] + 1
            for k in out[u]:
                if res[k] and level[head[k]] < 0:
                    level[head[k]] = lu
                    q.append(head[k])
        if level[t] < 0:
            break
        ptr = [0] * N
        while True:
            # iterative DFS for one augmenting path in the level graph
            path: list[int] = []
            u = s
            while u != t:
                arcs = out[u]
                i = ptr[u]
                while i < len(arcs):
                    k = arcs[i]
                    v = head[k]
                    if res[k] and level[v] == level[u] + 1:
                        break
                    i += 1
                ptr[u] = i
                if i == len(arcs):
                    if u == s:
                        path = None
                        break
                    level[u] = -1
                    k = path.pop()
                    u = head[k ^ 1]
                    ptr[u] += 1
                    continue
                path.append(arcs[i])
                u = head[arcs[i]]
            if path is None:
                break
            push = min(res[k] for k in path)
            for k in path:
                res[k] -= push
                res[k ^ 1] += push
            total += push
    flows = [net.cap[2 * a] - res[2 * a] for a in range(net.num_arcs)]
    seen = [False] * N
    seen[s] = True
    q = deque([s])
    while q:
        u = q.popleft()
        for k in out[u]:
            if res[k] and not seen[head[k]]:
                seen[head[k]] = True
                q.append(head[k])
    return FlowResult(total, flows, seen)


# ------------------------------------------------------------ bipartite pairs


class BipartitePair:
    """Classes ``A`` and ``B`` of equal size ``m``; edges run from A to B.

    ``rows[i]`` is a bitmask over B-indices of the neighbours of the i-th
    vertex of A.  ``left_labels``/``right_labels`` map local indices to
    vertex ids of a surrounding digraph (defaults ``0..m-1`` and
    ``m..2m-1``).
    """

    def __init__(self, m: int, rows: Sequence[int], left_labels=None, right_labels=None):
        if len(rows) != m:
            raise InputError("rows must have one bitmask per left vertex")
        full = (1 << m) - 1
        if any(r & ~full for r in rows):
            raise InputError("row bitmask outside the right class")
        self.m = m
        self.rows = tuple(rows)
        self.left_labels = tuple(left_labels) if left_labels is not None else tuple(range(m))
        self.right_labels = tuple(right_labels) if right_labels is not None else tuple(range(m, 2 * m))

    @classmethod
    def from_edges(cls, m, edges, **kw):
        rows = [0] * m
        for a, b in edges:
            rows[a] |= 1 << b
        return cls(m, rows, **kw)

    @classmethod
    def complete(cls, m, **kw):
        return cls(m, [(1 << m) - 1] * m, **kw)

    @property
    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    @property
    def density(self) -> float:
        return self.num_edges / (self.m * self.m) if self.m else 0.0

    def left_degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def right_degrees(self) -> list[int]:
        deg = [0] * self.m
        for r in self.rows:
            for b in bits(r):
                deg[b] += 1
        return deg

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.m) for b in bits(self.rows[a])]

    def has_edge(self, a: int, b: int) -> bool:
        return bool((self.rows[a] >> b) & 1)

    def biadjacency(self):
        import numpy as np
        mat = np.zeros((self.m, self.m), dtype=np.int8)
        for a, b in self.edges():
            mat[a, b] = 1
        return mat


@dataclass(frozen=True)
class DegreePrescription:
    """Target degree ``tau`` reduced by ``x`` on the left and ``y`` on the right."""

    tau: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    cap: int | None = None

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise InputError("x and y must have one entry per class vertex")
        if any(v < 0 for v in self.x + self.y):
            raise InputError("red degrees must be non-negative")
        if self.cap is not None and any(v > self.cap for v in self.x + self.y):
            raise InputError(f"red degree above cap {self.cap}")
        if sum(self.x) != sum(self.y):
            raise PrescriptionUnbalanced(f"sum x = {sum(self.x)} but sum y = {sum(self.y)}")
        if any(v > self.tau for v in self.x + self.y):
            raise InputError("red degree exceeds tau")

    @property
    def left_targets(self) -> list[int]:
        return [self.tau - v for v in self.x]

    @property
    def right_targets(self) -> list[int]:
        return [self.tau - v for v in self.y]


@dataclass
class PrescribedSubgraph:
    feasible: bool
    edges: list[tuple[int, int]]
    flow_value: int
    demand: int
    cut: tuple[list[int], list[int]] | None = None  # (S1 in A, S2 in B) on the source side


def prescribed_subgraph(pair: BipartitePair, p: DegreePrescription) -> PrescribedSubgraph:
    """Spanning subgraph with left degrees ``tau - x_i`` and right degrees ``tau - y_i``."""
    m = pair.m
    if len(p.x) != m:
        raise InputError("prescription size differs from the pair")
    s, t = 2 * m, 2 * m + 1
    net = FlowNetwork(2 * m + 2, s, t)
    for i, c in enumerate(p.left_targets):
        net.add_arc(s, i, c)
    edge_arcs = []
    for a in range(m):
        for b in bits(pair.rows[a]):
            edge_arcs.append((net.add_arc(a, m + b, 1) // 2, a, b))
    for j, d in enumerate(p.right_targets):
        net.add_arc(m + j, t, d)
    demand = sum(p.left_targets)
    res = max_flow(net)
    if res.value == demand:
        chosen = [(a, b) for arc, a, b in edge_arcs if res.arc_flows[arc]]
        return PrescribedSubgraph(True, chosen, res.value, demand)
    side = res.source_side
    S1 = [a for a in range(m) if side[a]]
    S2 = [b for b in range(m) if side[m + b]]
    return PrescribedSubgraph(False, [], res.value, demand, (S1, S2))


def tau_regular_union(blowup, red_edges, tau: int, n: int | None = None) -> Digraph:
    """Union of prescribed subgraphs over a blown-up cycle together with red edges.

    ``blowup`` lists ``(pair, x, y)`` where ``x[i]`` counts red edges leaving
    the i-th left vertex and ``y[j]`` red edges entering the j-th right
    vertex.  Every left vertex must end with out-degree ``tau`` and every
    right vertex with in-degree ``tau``; on a blown-up cycle this makes the
    result ``tau``-regular.
    """
    red = list(red_edges)
    labels = set()
    for pair, _, _ in blowup:
        labels.update(pair.left_labels)
        labels.update(pair.right_labels)
    for u, v in red:
        labels.update((u, v))
    if n is None:
        n = max(labels) + 1 if labels else 0
    red_out = [0] * n
    red_in = [0] * n
    for u, v in red:
        red_out[u] += 1
        red_in[v] += 1
    rows = [0] * n
    for u, v in red:
        rows[u] |= 1 << v
    for idx, (pair, x, y) in enumerate(blowup):
        for i, lab in enumerate(pair.left_labels):
            if x[i] != red_out[lab]:
                raise UnbalancedRedEdges(f"pair {idx}: vertex {lab} sends {red_out[lab]} red edges, x says {x[i]}")
        for j, lab in enumerate(pair.right_labels):
            if y[j] != red_in[lab]:
                raise UnbalancedRedEdges(f"pair {idx}: vertex {lab} receives {red_in[lab]} red edges, y says {y[j]}")
        try:
            presc = DegreePrescription(tau, tuple(x), tuple(y))
        except PrescriptionUnbalanced as exc:
            raise UnbalancedRedEdges(f"pair {idx}: {exc}") from None
        sub = prescribed_subgraph(pair, presc)
        if not sub.feasible:
            raise PairInfeasible(f"pair {idx} admits no prescribed subgraph "
                                 f"(flow {sub.flow_value} < {sub.demand})", cut=sub.cut)
        for a, b in sub.edges:
            u, v = pair.left_labels[a], pair.right_labels[b]
            if (rows[u] >> v) & 1:
                raise InputError(f"edge ({u},{v}) produced twice")
            rows[u] |= 1 << v
    out = Digraph(n, rows)
    senders = {lab for pair, _, _ in blowup for lab in pair.left_labels}
    receivers = {lab for pair, _, _ in blowup for lab in pair.right_labels}
    for v in sorted(labels):
        if (v in senders and out.out_degree(v) != tau) or (v in receivers and out.in_degree(v) != tau):
            raise UnbalancedRedEdges(f"vertex {v} ends with semidegrees "
                                     f"({out.out_degree(v)},{out.in_degree(v)}), expected {tau}")
    return out


def random_super_regular_pair(m: int, density: float, eps: float, seed: int,
                              switch_steps: int | None = None) -> BipartitePair:
    """Random pair whose every degree is ``round(density * m)``.

    Starts from a Cayley-type graph (left ``i`` joined to right
    ``pi(sigma(i) + s)`` for a random ``k``-set of shifts ``s``) and mixes it
    with degree-preserving edge switches.  Exact degrees put every vertex in
    the super-regular degree window; subset densities are left to the
    sampled checker.
    """
    k = round(density * m)
    if abs(k - density * m) > eps * m:
        raise InputError("no integer degree inside the window")
    rng = make_rng(seed, 41)
    shifts = rng.choice(m, size=k, replace=False).tolist()
    sigma = rng.permutation(m).tolist()
    pi = rng.permutation(m).tolist()
    nbrs = [set(pi[(sigma[i] + s) % m] for s in shifts) for i in range(m)]
    edges = [(a, b) for a in range(m) for b in nbrs[a]]
    if switch_steps is None:
        switch_steps = 2 * len(edges)
    if edges and switch_steps:
        picks = rng.integers(0, len(edges), size=(switch_steps, 2)).tolist()
        for e1, e2 in picks:
            a1, b1 = edges[e1]
            a2, b2 = edges[e2]
            if a1 == a2 or b1 == b2 or b2 in nbrs[a1] or b1 in nbrs[a2]:
                continue
            nbrs[a1].remove(b1)
            nbrs[a2].remove(b2)
            nbrs[a1].add(b2)
            nbrs[a2].add(b1)
            edges[e1] = (a1, b2)
            edges[e2] = (a2, b1)
    rows = [sum(1 << b for b in nbrs[a]) for a in range(m)]
    return BipartitePair(m, rows)


def random_balanced_prescription(m: int, tau: int, cap: int, seed: int) -> DegreePrescription:
    """Random red-degree vectors bounded by ``cap`` with equal sums."""
    rng = make_rng(seed, 42)
    x = rng.integers(0, cap + 1, size=m).tolist()
    y = rng.integers(0, cap + 1, size=m).tolist()
    diff = sum(x) - sum(y)
    order = rng.permutation(m).tolist()
    # move the surplus side down until sums agree
    while diff:
        vec, step = (x, -1) if diff > 0 else (y, -1)
        for i in order:
            if diff == 0:
                break
            if vec[i] > 0:
                vec[i] += step
                diff += step if vec is x else -step
    return DegreePrescription(tau, tuple(x), tuple(y), cap=cap)

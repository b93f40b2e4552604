"""Cluster-level structures: reduced multidigraphs, almost 1-factors and shifted walks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    ConnectingEdgeNotFound,
    DegreeHypothesisViolated,
    HypothesisViolated,
    InputError,
    PatchingFailed,
    ReservoirSelectionFailed,
    UnequalClusters,
)
from .graph import CycleSet, Digraph, bits, random_regular_tournament
from .rng import derive_seed, make_rng


@dataclass(frozen=True)
class RegularityParams:
    eps: float = 0.01
    eps_prime: float = 0.01
    d: float = 0.1
    beta: float = 0.05
    d_prime: float = 0.1
    min_clusters: int = 1

    def __post_init__(self):
        if not (0 < self.eps < 1 and 0 < self.eps_prime < 1):
            raise InputError("need 0 < eps < 1 and 0 < eps' < 1")
        for name in ("d", "beta", "d_prime"):
            if not 0 <= getattr(self, name) <= 1:
                raise InputError(f"{name} must lie in [0, 1]")
        if self.beta == 0:
            raise InputError("beta must be positive")


@dataclass
class ReducedMultiDigraph:
    """``mult[i, j]`` parallel edges from cluster ``i`` to cluster ``j``.

    Parallel edges are told apart by an index ``k < mult[i, j]``.
    """

    clusters: list[list[int]]
    mult: np.ndarray
    density: np.ndarray

    @property
    def L(self) -> int:
        return len(self.clusters)

    @property
    def m(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    def out_degrees(self, among: Sequence[int] | None = None) -> np.ndarray:
        sub = self.mult if among is None else self.mult[np.ix_(among, among)]
        return sub.sum(axis=1)

    def in_degrees(self, among: Sequence[int] | None = None) -> np.ndarray:
        sub = self.mult if among is None else self.mult[np.ix_(among, among)]
        return sub.sum(axis=0)

    def multiplicities(self) -> dict[tuple[int, int], int]:
        nz = np.argwhere(self.mult > 0)
        return {(int(i), int(j)): int(self.mult[i, j]) for i, j in nz}

    @classmethod
    def from_multiplicities(cls, L: int, mult: dict[tuple[int, int], int]) -> "ReducedMultiDigraph":
        arr = np.zeros((L, L), dtype=np.int64)
        for (i, j), k in mult.items():
            arr[i, j] = k
        return cls([[] for _ in range(L)], arr, np.zeros((L, L)))


def _adjacency(g: Digraph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u in range(g.n):
        for v in bits(g.out_rows[u]):
            a[u, v] = 1
    return a


def build_reduced_multidigraph(g: Digraph, partition: list[list[int]],
                               p: RegularityParams) -> ReducedMultiDigraph:
    """Multiplicity ``floor(d_ij / beta)`` for every pair of density at least ``p.d``."""
    L = len(partition)
    sizes = {len(c) for c in partition}
    if len(sizes) > 1:
        raise UnequalClusters(f"cluster sizes {sorted(sizes)}")
    seen = [v for c in partition for v in c]
    if len(set(seen)) != len(seen) or any(not 0 <= v < g.n for v in seen):
        raise InputError("clusters must be disjoint sets of vertices of g")
    m = sizes.pop() if sizes else 0
    if L == 0 or m == 0:
        z = np.zeros((L, L), dtype=np.int64)
        return ReducedMultiDigraph([list(c) for c in partition], z, z.astype(float))
    ind = np.zeros((L, g.n), dtype=np.int64)
    for i, c in enumerate(partition):
        ind[i, c] = 1
    counts = ind @ _adjacency(g) @ ind.T
    dens = counts / float(m * m)
    np.fill_diagonal(dens, 0.0)
    # exact integer floor: counts // (beta m^2) up to float rounding of beta
    mult = np.floor(dens / p.beta + 1e-9).astype(np.int64)
    mult[dens < p.d] = 0
    np.fill_diagonal(mult, 0)
    return ReducedMultiDigraph([list(c) for c in partition], mult, dens)


@dataclass
class EdgeCountResult:
    count: int
    bound: float
    ok: bool


def edge_count_check(rm: ReducedMultiDigraph, X: Sequence[int], A: Sequence[int],
                     B: Sequence[int], beta: float, c: float) -> EdgeCountResult:
    """Count edges from ``A`` to ``B`` and compare with ``|X|^2 / (60 beta)``."""
    Xs = sorted(set(X))
    if not set(A) <= set(Xs) or not set(B) <= set(Xs):
        raise HypothesisViolated("A and B must be subsets of X")
    need = (0.5 - c) * len(Xs)
    if len(set(A)) < need - 1e-9 or len(set(B)) < need - 1e-9:
        raise HypothesisViolated(f"A and B need at least {need:.2f} clusters")
    sub_min = min(rm.out_degrees(Xs).min(), rm.in_degrees(Xs).min()) if Xs else 0
    if sub_min < (0.5 - c) * len(Xs) / beta - 1e-9:
        raise HypothesisViolated(f"semidegree {sub_min} of R_m[X] below (1/2-c)|X|/beta")
    Al, Bl = sorted(set(A)), sorted(set(B))
    count = int(rm.mult[np.ix_(Al, Bl)].sum())
    bound = len(Xs) ** 2 / (60 * beta)
    return EdgeCountResult(count, bound, count >= bound)


# ------------------------------------------------------------ almost 1-factors


@dataclass
class AlmostFactorResult:
    """``collections[i]`` is a CycleSet; ``edges[i]`` lists its labelled edges ``(u, v, k)``."""

    collections: list[CycleSet]
    edges: list[list[tuple[int, int, int]]]
    reservoir: list[int]
    r_prime: int
    temporary_edges: int
    patched_paths: int
    reservoir_attempts: int


def _pad_to_regular(mult: np.ndarray, r_prime: int) -> np.ndarray:
    """Temporary edges, pairing the lowest-index deficient out- and in-vertices."""
    n = mult.shape[0]
    tmp = np.zeros_like(mult)
    dout = (r_prime - mult.sum(axis=1)).tolist()
    din = (r_prime - mult.sum(axis=0)).tolist()
    i = j = 0
    while True:
        while i < n and dout[i] == 0:
            i += 1
        while j < n and din[j] == 0:
            j += 1
        if i == n or j == n:
            break
        k = min(dout[i], din[j])
        tmp[i, j] += k
        dout[i] -= k
        din[j] -= k
    return tmp


def _factorize_min_temporary(real: np.ndarray, tmp: np.ndarray, r_prime: int):
    """Peel off ``r_prime`` perfect matchings, each using as few temporary edges as possible."""
    real = real.copy()
    tmp = tmp.copy()
    big = 10 ** 6
    factors = []
    for _ in range(r_prime):
        cost = np.where(real > 0, 0, np.where(tmp > 0, 1, big))
        rows, cols = linear_sum_assignment(cost)
        if cost[rows, cols].max() >= big:  # cannot happen for a regular multigraph
            raise HypothesisViolated("padded multigraph lost regularity")
        succ = cols.tolist()
        is_tmp = []
        for a, b in zip(rows.tolist(), succ):
            if real[a, b] > 0:
                real[a, b] -= 1
                is_tmp.append(False)
            else:
                tmp[a, b] -= 1
                is_tmp.append(True)
        factors.append((succ, is_tmp))
    return factors


def _paths_after_removal(succ: list[int], is_tmp: list[bool]):
    """Split a 1-factor at its temporary edges into cycles and paths (lists of local indices)."""
    n = len(succ)
    seen = [False] * n
    cycles, paths = [], []
    for s in range(n):
        if seen[s]:
            continue
        cyc = []
        v = s
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = succ[v]
        cuts = [i for i, v in enumerate(cyc) if is_tmp[v]]
        if not cuts:
            cycles.append(cyc)
            continue
        k = len(cyc)
        for a, b in zip(cuts, cuts[1:] + [cuts[0] + k]):
            # temporary edge leaves cyc[a]; the path runs cyc[a+1] .. cyc[b]
            paths.append([cyc[(t) % k] for t in range(a + 1, b + 1)])
    return cycles, paths


def almost_one_factors(rm: ReducedMultiDigraph, beta: float, c: float, seed: int,
                       d: float = 0.1, eta: float = 0.05,
                       max_reservoir_tries: int = 100) -> AlmostFactorResult:
    """Edge-disjoint cycle collections in ``rm`` each covering all but ``c L`` clusters."""
    L = rm.L
    mult = rm.mult
    r = math.floor((0.5 - c) * L / beta + 1e-9)
    lo_deg = (0.5 - 4 * d) * L / beta
    hi_deg = (0.5 + 2 * eta) * L / beta
    outd, ind = mult.sum(axis=1), mult.sum(axis=0)
    if min(outd.min(), ind.min()) < lo_deg - 1e-9:
        raise DegreeHypothesisViolated(f"minimum semidegree {min(outd.min(), ind.min())} < {lo_deg:.2f}")
    if max(outd.max(), ind.max()) > hi_deg + 1e-9:
        raise DegreeHypothesisViolated(f"maximum semidegree {max(outd.max(), ind.max())} > {hi_deg:.2f}")
    size_x = round(c * L)
    win_lo = (0.5 - 5 * d) * size_x / beta
    win_hi = (0.5 + 5 * d) * size_x / beta
    rng = make_rng(seed, 71)
    last_err: Exception | None = None
    for attempt in range(1, max_reservoir_tries + 1):
        X = sorted(rng.choice(L, size=size_x, replace=False).tolist())
        into_x = mult[:, X].sum(axis=1)
        from_x = mult[X, :].sum(axis=0)
        if min(into_x.min(), from_x.min()) < win_lo - 1e-9 or max(into_x.max(), from_x.max()) > win_hi + 1e-9:
            continue
        try:
            res = _factors_for_reservoir(rm, X, r, beta, c, d)
        except (PatchingFailed, ReservoirSelectionFailed) as exc:
            last_err = exc
            continue
        res.reservoir_attempts = attempt
        return res
    if isinstance(last_err, PatchingFailed):
        raise last_err
    raise ReservoirSelectionFailed(f"no usable reservoir in {max_reservoir_tries} draws: {last_err}")


def _factors_for_reservoir(rm, X, r, beta, c, d) -> AlmostFactorResult:
    L = rm.L
    inX = set(X)
    rest = [v for v in range(L) if v not in inX]
    real = rm.mult[np.ix_(rest, rest)]
    r_prime = max(int(real.sum(axis=1).max()), int(real.sum(axis=0).max()), r)
    tmp = _pad_to_regular(real, r_prime)
    factors = _factorize_min_temporary(real, tmp, r_prime)
    limit = math.sqrt(d) * L
    ranked = sorted(range(r_prime), key=lambda i: (sum(factors[i][1]), i))
    chosen = [i for i in ranked if sum(factors[i][1]) <= limit][:r]
    if len(chosen) < r:
        raise ReservoirSelectionFailed(f"only {len(chosen)} factors with at most {limit:.1f} temporary edges")
    chosen.sort()

    next_k: dict[tuple[int, int], int] = {}

    def take(u: int, v: int) -> tuple[int, int, int]:
        k = next_k.get((u, v), 0)
        next_k[(u, v)] = k + 1
        return (u, v, k)

    collections: list[list[list[int]]] = []
    labelled: list[list[tuple[int, int, int]]] = []
    pending = []
    for fi in chosen:
        succ, is_tmp = factors[fi]
        cycles, paths = _paths_after_removal(succ, is_tmp)
        cyc_g = [[rest[v] for v in cyc] for cyc in cycles]
        edges = [take(cyc[i], cyc[(i + 1) % len(cyc)]) for cyc in cyc_g for i in range(len(cyc))]
        for p in paths:
            pg = [rest[v] for v in p]
            edges.extend(take(pg[i], pg[i + 1]) for i in range(len(pg) - 1))
            pending.append((len(collections), pg))
        collections.append(cyc_g)
        labelled.append(edges)

    # patch edges touch the reservoir, so their indices are disjoint from factor edges
    free = {}
    for u in range(L):
        for v in range(L):
            k = int(rm.mult[u, v])
            if k and (u in inX or v in inX):
                free[(u, v)] = list(range(k))
    used_in: dict[int, set[int]] = {}

    def nfree(u, v):
        return len(free.get((u, v), ()))

    for ci, pg in pending:
        a, b = pg[0], pg[-1]
        used = used_in.setdefault(ci, set())
        ok = [x for x in X if x not in used]

        def best(cands):
            return max(cands, key=lambda x: (x[0], -x[1]))[1] if cands else None

        a_minus = best([(nfree(x, a), x) for x in ok if nfree(x, a)])
        b_plus = best([(nfree(b, x), x) for x in ok if x != a_minus and nfree(b, x)])
        A1 = [x for x in ok if x not in (a_minus, b_plus) and b_plus is not None and nfree(b_plus, x)]
        A2 = [x for x in ok if x not in (a_minus, b_plus) and a_minus is not None and nfree(x, a_minus)]
        mid = [(nfree(x, y), x, y) for x in A1 for y in A2 if x != y and nfree(x, y)]
        if a_minus is None or b_plus is None or not mid:
            raise PatchingFailed(f"no patch for path {pg[0]}..{pg[-1]} in collection {ci}", path=pg,
                                 candidates={"a_minus": a_minus, "b_plus": b_plus, "A1": A1, "A2": A2})
        _, bpp, amm = max(mid, key=lambda t: (t[0], -t[1], -t[2]))
        route = [b, b_plus, bpp, amm, a_minus, a]
        for u, v in zip(route, route[1:]):
            k = free[(u, v)].pop(0)
            labelled[ci].append((u, v, k))
        used.update((b_plus, bpp, amm, a_minus))
        collections[ci].append(pg + [b_plus, bpp, amm, a_minus])

    result = [CycleSet(tuple(tuple(cyc) for cyc in cols)) for cols in collections]
    return AlmostFactorResult(result, labelled, list(X), r_prime,
                              int(sum(sum(factors[i][1]) for i in chosen)), len(pending), 0)


def audit_almost_one_factors(rm: ReducedMultiDigraph, res: AlmostFactorResult, c: float) -> list[str]:
    problems = []
    seen: set[tuple[int, int, int]] = set()
    L = rm.L
    for idx, (cs, edges) in enumerate(zip(res.collections, res.edges)):
        if len(cs.covered) < (1 - c) * L - 1e-9:
            problems.append(f"collection {idx} covers {len(cs.covered)} < (1-c)L clusters")
        want = sorted(cs.edges())
        got = sorted((u, v) for u, v, _ in edges)
        if want != got:
            problems.append(f"collection {idx}: labelled edges do not match its cycles")
        for e in edges:
            u, v, k = e
            if not 0 <= k < rm.mult[u, v]:
                problems.append(f"collection {idx}: edge {e} exceeds multiplicity {rm.mult[u, v]}")
            if e in seen:
                problems.append(f"edge {e} used twice")
            seen.add(e)
    return problems


def random_multidigraph_instance(seed: int, L: int = 40, m: int = 10, beta: float = 0.05,
                                 mix: int | None = None) -> ReducedMultiDigraph:
    """Reduced multidigraph of a random regular tournament split into ``L`` random clusters."""
    n = L * m + 1
    t = random_regular_tournament(n, mix_steps=mix if mix is not None else 4 * n * n,
                                  seed=derive_seed(seed, 1))
    rng = make_rng(seed, 72)
    perm = rng.permutation(n)[: L * m].tolist()
    parts = [sorted(perm[i * m:(i + 1) * m]) for i in range(L)]
    return build_reduced_multidigraph(t, parts, RegularityParams(beta=beta, d=0.0))


# ------------------------------------------------------------ shifted walks


@dataclass
class ShiftedWalk:
    """Segments ``(cycle index, entry, exit)``; each traverses its cycle once from entry to exit."""

    segments: list[tuple[int, int, int]]
    walk: list[int]
    traversals: list[int] = field(default_factory=list)


def _cycle_maps(F: CycleSet):
    succ, pred, which = {}, {}, {}
    for ci, cyc in enumerate(F.cycles):
        for i, v in enumerate(cyc):
            succ[v] = cyc[(i + 1) % len(cyc)]
            pred[cyc[(i + 1) % len(cyc)]] = v
            which[v] = ci
    return succ, pred, which


def shifted_walk(host: Digraph, F: CycleSet, traversal_bound: int | None = None) -> ShiftedWalk:
    """Closed walk alternating full cycle traversals of ``F`` with host edges."""
    t = len(F.cycles)
    if t == 0:
        return ShiftedWalk([], [], [])
    succ, pred, which = _cycle_maps(F)
    if traversal_bound is None:
        traversal_bound = 3 * host.n
    if t == 1:
        cyc = F.cycles[0]
        a = cyc[0]
        if not host.has_edge(a, succ[a]):
            raise ConnectingEdgeNotFound("single cycle is not contained in the host", witness=(a, succ[a]))
        segs = [(0, succ[a], a)]
    else:
        covered = sorted(which)

        def options(a):
            U = [u for u in covered if host.has_edge(a, u)]
            V = [v for v in covered if host.has_edge(v, succ[a])]
            return U, V

        anchors = []
        for cyc in F.cycles:
            a = max(cyc, key=lambda v: (min(len(x) for x in options(v)), -v))
            anchors.append(a)
        segs = []
        for i in range(t):
            a = anchors[i]
            a_next = anchors[(i + 1) % t]
            U, _ = options(a)
            _, V_next = options(a_next)
            U_minus = [pred[u] for u in U]
            V_plus = [succ[v] for v in V_next]
            pick = next(((x, y) for x in sorted(U_minus) for y in sorted(V_plus) if host.has_edge(x, y)), None)
            if pick is None:
                raise ConnectingEdgeNotFound(f"no edge between the neighbourhoods of cycles {i} and {(i + 1) % t}",
                                             witness=(sorted(U_minus), sorted(V_plus)))
            u_minus, v_plus = pick
            u = succ[u_minus]
            v = pred[v_plus]
            segs.append((i, succ[a], a))
            segs.append((which[u], u, u_minus))
            segs.append((which[v_plus], v_plus, v))
    walk = []
    for ci, entry, exit_ in segs:
        v = entry
        walk.append(v)
        while v != exit_:
            v = succ[v]
            walk.append(v)
    counts = [0] * t
    for ci, _, _ in segs:
        counts[ci] += 1
    if max(counts) > traversal_bound:
        raise ConnectingEdgeNotFound(f"traversal count {max(counts)} exceeds bound {traversal_bound}")
    return ShiftedWalk(segs, walk, counts)


def audit_shifted_walk(host: Digraph, F: CycleSet, w: ShiftedWalk) -> list[str]:
    problems = []
    succ, _, which = _cycle_maps(F)
    if len(F.cycles) and set(range(len(F.cycles))) - {ci for ci, _, _ in w.segments}:
        problems.append("some cycle is never traversed")
    for idx, (ci, entry, exit_) in enumerate(w.segments):
        if which.get(entry) != ci or which.get(exit_) != ci or succ[exit_] != entry:
            problems.append(f"segment {idx} is not a full traversal of cycle {ci}")
        nxt = w.segments[(idx + 1) % len(w.segments)]
        if not host.has_edge(exit_, nxt[1]):
            problems.append(f"connecting pair {exit_}->{nxt[1]} is not a host edge")
    visits: dict[int, int] = {}
    for v in w.walk:
        visits[v] = visits.get(v, 0) + 1
    for ci, cyc in enumerate(F.cycles):
        vals = {visits.get(v, 0) for v in cyc}
        if len(vals) != 1:
            problems.append(f"cycle {ci} visited unevenly: {sorted(vals)}")
    for a, b in zip(w.walk, w.walk[1:] + w.walk[:1]):
        if succ.get(a) != b and not host.has_edge(a, b):
            problems.append(f"walk step {a}->{b} is neither an F edge nor a host edge")
            break
    return problems


def random_shifted_walk_instance(seed: int, L: int = 30, p: float = 0.6, cycles: int | None = None,
                                 c: float = 0.1):
    """Dense random host digraph with 2 to 5 planted vertex-disjoint cycles."""
    rng = make_rng(seed, 73)
    k = int(rng.integers(2, 6)) if cycles is None else cycles
    cover = L - int(rng.integers(0, math.floor(c * L) + 1))
    order = rng.permutation(L)[:cover].tolist()
    cuts = sorted(rng.choice(np.arange(2, cover - 1), size=k - 1, replace=False).tolist()) if k > 1 else []
    bounds = [0] + cuts + [cover]
    # keep every cycle at least length 2
    while any(b - a < 2 for a, b in zip(bounds, bounds[1:])):
        cuts = sorted(rng.choice(np.arange(2, cover - 1), size=k - 1, replace=False).tolist())
        bounds = [0] + cuts + [cover]
    planted = tuple(tuple(order[a:b]) for a, b in zip(bounds, bounds[1:]))
    F = CycleSet(planted)
    mat = rng.random((L, L)) < p
    np.fill_diagonal(mat, False)
    for u, v in F.edges():
        mat[u, v] = True
    rows = [sum(1 << int(j) for j in np.nonzero(mat[i])[0]) for i in range(L)]
    return Digraph(L, rows), F

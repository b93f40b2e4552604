"""Regularity checks and the pair-level tools built on them.

For a fixed left subset X the densest and sparsest right subsets of each
size are read off by sorting the right vertices by their number of
neighbours in X.  The exhaustive checker runs this for every X; the sampled
checker for random X only, which can refute regularity but not certify it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, RetryBudgetExhausted, TooLargeForExhaustive, TooManyBadVertices
from .flow import BipartitePair
from .graph import bits
from .rng import derive_seed, make_rng

EXHAUSTIVE_LIMIT = 18


@dataclass
class RegularityVerdict:
    regular: bool
    worst_deviation: float
    witness: tuple[list[int], list[int]] | None
    exact: bool


def _min_size(eps: float, m: int) -> int:
    return max(1, math.ceil(eps * m - 1e-9))


def _worst_subset_deviation(pair: BipartitePair, ref: float, eps: float, mode: str,
                            trials: int, seed: int):
    m = pair.m
    if m == 0:
        return 0.0, None, True
    lo = _min_size(eps, m)
    mat = pair.biadjacency().astype(np.int32)
    if mode == "exhaustive":
        if m > EXHAUSTIVE_LIMIT:
            raise TooLargeForExhaustive(f"exhaustive check needs m <= {EXHAUSTIVE_LIMIT}, got {m}")
        masks = np.arange(1, 1 << m, dtype=np.int64)
        sel = ((masks[:, None] >> np.arange(m)) & 1).astype(np.int32)
        sel = sel[sel.sum(axis=1) >= lo]
        exact = True
    elif mode == "sampled":
        rng = make_rng(seed, 61)
        sel = np.zeros((trials, m), dtype=np.int32)
        sizes = rng.integers(lo, m + 1, size=trials).tolist()
        for r, s in enumerate(sizes):
            sel[r, rng.choice(m, size=s, replace=False)] = 1
        exact = False
    else:
        raise InputError(f"unknown mode {mode!r}")
    xs = sel.sum(axis=1).astype(np.float64)
    deg = sel @ mat
    order = np.argsort(deg, axis=1, kind="stable")
    asc = np.take_along_axis(deg, order, axis=1)
    low = np.cumsum(asc, axis=1)
    high = np.cumsum(asc[:, ::-1], axis=1)
    t = np.arange(1, m + 1, dtype=np.float64)
    denom = xs[:, None] * t[None, :]
    dev_low = np.abs(low / denom - ref)
    dev_high = np.abs(high / denom - ref)
    dev_low[:, : lo - 1] = -1.0
    dev_high[:, : lo - 1] = -1.0
    best = -1.0
    witness = None
    for dev, descending in ((dev_high, True), (dev_low, False)):
        idx = int(np.argmax(dev))
        r, c = divmod(idx, m)
        if dev[r, c] > best:
            best = float(dev[r, c])
            X = [int(i) for i in np.nonzero(sel[r])[0]]
            cols = order[r][::-1] if descending else order[r]
            witness = (X, sorted(int(j) for j in cols[: c + 1]))
    return max(best, 0.0), witness, exact


def check_regularity(pair: BipartitePair, eps: float, eps_prime: float, mode: str = "exhaustive",
                     trials: int = 500, seed: int = 0) -> RegularityVerdict:
    """Is every ``eps``-large subpair within ``eps_prime`` of the pair density?"""
    if not (0 < eps < 1 and 0 < eps_prime < 1):
        raise InputError("need 0 < eps < 1 and 0 < eps' < 1")
    worst, wit, exact = _worst_subset_deviation(pair, pair.density, eps, mode, trials, seed)
    return RegularityVerdict(worst < eps_prime, worst, wit, exact)


@dataclass
class SuperRegularityVerdict:
    density_ok: bool
    degree_ok: bool
    worst_deviation: float
    density_witness: tuple[list[int], list[int]] | None
    bad_left: list[int]
    bad_right: list[int]
    density_exact: bool

    @property
    def super_regular(self) -> bool:
        return self.density_ok and self.degree_ok


def check_super_regularity(pair: BipartitePair, eps: float, d: float, mode: str | None = None,
                           trials: int = 500, seed: int = 0) -> SuperRegularityVerdict:
    """Subset densities within ``d +- eps`` and every degree within ``(d +- eps) m``."""
    if mode is None:
        mode = "exhaustive" if pair.m <= EXHAUSTIVE_LIMIT else "sampled"
    worst, wit, exact = _worst_subset_deviation(pair, d, eps, mode, trials, seed)
    tol = 1e-12
    m = pair.m
    lo, hi = (d - eps) * m - tol, (d + eps) * m + tol
    bad_left = [a for a, deg in enumerate(pair.left_degrees()) if not lo <= deg <= hi]
    bad_right = [b for b, deg in enumerate(pair.right_degrees()) if not lo <= deg <= hi]
    return SuperRegularityVerdict(worst <= eps + tol, not bad_left and not bad_right, worst, wit,
                                  bad_left, bad_right, exact)


def split_pair(pair: BipartitePair, K: float, seed: int) -> list[BipartitePair]:
    """Assign each edge to part ``i`` with probability ``1/K`` for ``i < floor(K)``."""
    if K < 1:
        raise InputError("K must be at least 1")
    parts = math.floor(K)
    rng = make_rng(seed, 62)
    rows = [[0] * pair.m for _ in range(parts)]
    edges = pair.edges()
    draws = rng.random(len(edges)).tolist()
    for (a, b), u in zip(edges, draws):
        i = int(u * K)
        if i < parts:
            rows[i][a] |= 1 << b
    return [BipartitePair(pair.m, r, pair.left_labels, pair.right_labels) for r in rows]


def restrict_pair(pair: BipartitePair, keep_left, keep_right) -> BipartitePair:
    kl, kr = list(keep_left), list(keep_right)
    col = {b: j for j, b in enumerate(kr)}
    rows = []
    for a in kl:
        r = 0
        for b in bits(pair.rows[a]):
            if b in col:
                r |= 1 << col[b]
        rows.append(r)
    return BipartitePair(len(kl), rows, [pair.left_labels[a] for a in kl],
                         [pair.right_labels[b] for b in kr])


@dataclass
class TrimResult:
    kept: list[list[int]]
    deleted_bad: list[list[int]]
    deleted_padding: list[list[int]]


def trim_super_regular(cycle_pairs: list[BipartitePair], eps: float, beta: float) -> TrimResult:
    """Shrink every cluster of a cycle of pairs to ``m - floor(4 eps m)`` vertices.

    ``cycle_pairs[t]`` runs from cluster ``t`` to cluster ``t+1`` (indices
    mod the cycle length).  A vertex is bad when its out-degree in the
    forward pair or its in-degree in the backward pair is not strictly
    inside ``(beta +- 2 eps) m``.  Bad vertices go first; the quota is then
    filled with the vertices whose degrees sit furthest from ``beta m``.
    """
    s = len(cycle_pairs)
    if s == 0:
        return TrimResult([], [], [])
    m = cycle_pairs[0].m
    if any(p.m != m for p in cycle_pairs):
        raise InputError("all clusters must have the same size")
    quota = math.floor(4 * eps * m + 1e-9)
    lo, hi = (beta - 2 * eps) * m, (beta + 2 * eps) * m
    kept, bad_all, pad_all = [], [], []
    for t in range(s):
        fwd = cycle_pairs[t].left_degrees()
        bwd = cycle_pairs[t - 1].right_degrees()
        bad = [v for v in range(m) if not (lo < fwd[v] < hi) or not (lo < bwd[v] < hi)]
        if len(bad) > quota:
            raise TooManyBadVertices(f"cluster {t}: {len(bad)} bad vertices exceed 4*eps*m = {quota}")
        badset = set(bad)
        rest = sorted((v for v in range(m) if v not in badset),
                      key=lambda v: (-max(abs(fwd[v] - beta * m), abs(bwd[v] - beta * m)), v))
        pad = sorted(rest[: quota - len(bad)])
        gone = badset | set(pad)
        kept.append([v for v in range(m) if v not in gone])
        bad_all.append(bad)
        pad_all.append(pad)
    return TrimResult(kept, bad_all, pad_all)


@dataclass
class BoundedDegreeResult:
    pair: BipartitePair
    attempts: int
    dropped_left: list[int] = field(default_factory=list)
    dropped_right: list[int] = field(default_factory=list)


def bounded_degree_subgraph(pair: BipartitePair, d0: float, seed: int,
                            max_attempts: int = 20) -> BoundedDegreeResult:
    """Sparse subgraph with maximum degree ``<= d0 n`` and average degree ``>= d0 n / 8``.

    High-degree vertices (``>= 2 d1 n``) lose all their edges, then every
    other edge survives with probability ``d0 / (3 d1)``.
    """
    n = pair.m
    d1 = pair.density
    if d1 == 0 or d0 > d1 + 1e-12:
        raise InputError("need 0 < d0 <= density")
    heavy = 2 * d1 * n
    drop_l = [a for a, deg in enumerate(pair.left_degrees()) if deg >= heavy]
    drop_r = [b for b, deg in enumerate(pair.right_degrees()) if deg >= heavy]
    mask_r = ~sum(1 << b for b in drop_r)
    dl = set(drop_l)
    base = [0 if a in dl else pair.rows[a] & mask_r for a in range(n)]
    edges = [(a, b) for a in range(n) for b in bits(base[a])]
    keep_p = d0 / (3 * d1)
    for attempt in range(max_attempts):
        rng = make_rng(derive_seed(seed, attempt), 63)
        coins = rng.random(len(edges)).tolist()
        rows = [0] * n
        for (a, b), u in zip(edges, coins):
            if u < keep_p:
                rows[a] |= 1 << b
        sub = BipartitePair(n, rows, pair.left_labels, pair.right_labels)
        max_deg = max(sub.left_degrees() + sub.right_degrees(), default=0)
        if max_deg <= d0 * n and sub.num_edges / n >= d0 * n / 8:
            return BoundedDegreeResult(sub, attempt + 1, drop_l, drop_r)
    raise RetryBudgetExhausted(f"no admissible subgraph in {max_attempts} attempts")

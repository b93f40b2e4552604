"""Edge-disjoint Hamilton cycles from a reserve-assisted sequence of 1-factors.

The input is split into a sparse random reserve and a core.  The core is
trimmed to a regular spanning subgraph, then repeatedly a 1-factor with few
cycles is drawn from it and its cycles are merged into one Hamilton cycle
with edges borrowed from the reserve.  Factor edges displaced by a merge are
paid back into the reserve, so reserve semidegrees never change.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    BudgetExceeded,
    DegreeWindowUnreachable,
    HamDecompError,
    InputError,
    MergeStuck,
    NoClosingEdge,
    ReserveDepleted,
    ResampleBudgetExhausted,
)
from .factorizer import FewCycleParams, count_cycles, few_cycle_one_factor
from .flow import BipartitePair, DegreePrescription, prescribed_subgraph
from .graph import Digraph, semidegrees
from .rng import derive_seed, make_rng
from .rotation import MergeStats, ReserveGraph, merge_cycles

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecomposerConfig:
    gamma: float = 0.12
    cycle_cap: int | None = None
    budget_per_cycle: int = 6
    max_failure_streak: int = 10
    seed: int = 0
    chain_steps_per_edge: float = 2.0
    max_resamples: int = 50
    slack: int | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 0.25:
            raise InputError("gamma must lie in (0, 1/4)")
        if self.budget_per_cycle <= 0 or self.max_failure_streak <= 0 or self.max_resamples <= 0:
            raise InputError("budgets must be positive")
        if self.chain_steps_per_edge < 0:
            raise InputError("chain_steps_per_edge must be non-negative")


def reserve_window(g: Digraph, gamma: float) -> tuple[int, int]:
    prof = semidegrees(g)
    lo = math.ceil(0.5 * gamma * prof.min_semidegree - 1e-9)
    hi = math.floor(2 * gamma * prof.max_semidegree + 1e-9)
    return lo, hi


def reserve_split(g: Digraph, gamma: float, seed: int, slack: int | None = None,
                  max_rounds: int = 100, target: tuple[int, int] | None = None) -> tuple[Digraph, Digraph]:
    """Sample each edge into the reserve with probability ``gamma``, then repair degrees.

    Every reserve semidegree ends in ``[0.5 gamma delta, 2 gamma Delta]``, or in
    ``target`` when a narrower window inside that one is requested.
    """
    if not 0 < gamma < 0.25:
        raise InputError("gamma must lie in (0, 1/4)")
    prof = semidegrees(g)
    if slack is not None and prof.max_semidegree - prof.min_semidegree > slack:
        raise InputError(f"semidegree spread exceeds slack {slack}")
    lo, hi = reserve_window(g, gamma)
    if target is not None:
        lo, hi = max(lo, target[0]), min(hi, target[1])
    if lo > hi:
        raise DegreeWindowUnreachable(f"reserve window [{lo},{hi}] is empty")
    n = g.n
    rng = make_rng(seed, 81)
    edges = g.edges()
    coins = rng.random(len(edges)).tolist()
    r_out = [set() for _ in range(n)]
    r_in = [set() for _ in range(n)]
    c_out = [set() for _ in range(n)]
    c_in = [set() for _ in range(n)]
    for (u, v), x in zip(edges, coins):
        if x < gamma:
            r_out[u].add(v)
            r_in[v].add(u)
        else:
            c_out[u].add(v)
            c_in[v].add(u)

    def move(u, v, to_reserve):
        src_o, src_i, dst_o, dst_i = (c_out, c_in, r_out, r_in) if to_reserve else (r_out, r_in, c_out, c_in)
        src_o[u].discard(v)
        src_i[v].discard(u)
        dst_o[u].add(v)
        dst_i[v].add(u)

    def pick(cands, good):
        pool = sorted(cands)
        pref = [w for w in pool if good(w)] or pool
        return pref[int(rng.integers(len(pref)))] if pref else None

    for _ in range(max_rounds):
        changed = False
        for v in range(n):
            while len(r_out[v]) > hi:
                w = pick(r_out[v], lambda w: len(r_in[w]) > lo)
                move(v, w, False)
                changed = True
            while len(r_out[v]) < lo:
                w = pick(c_out[v], lambda w: len(r_in[w]) < hi)
                if w is None:
                    break
                move(v, w, True)
                changed = True
            while len(r_in[v]) > hi:
                w = pick(r_in[v], lambda w: len(r_out[w]) > lo)
                move(w, v, False)
                changed = True
            while len(r_in[v]) < lo:
                w = pick(c_in[v], lambda w: len(r_out[w]) < hi)
                if w is None:
                    break
                move(w, v, True)
                changed = True
        if all(lo <= len(r_out[v]) <= hi and lo <= len(r_in[v]) <= hi for v in range(n)):
            core = Digraph(n, [sum(1 << w for w in c_out[v]) for v in range(n)])
            res = Digraph(n, [sum(1 << w for w in r_out[v]) for v in range(n)])
            return core, res
        if not changed:
            break
    raise DegreeWindowUnreachable(f"could not bring reserve semidegrees into [{lo},{hi}]")


def regular_spanning_subgraph(g: Digraph) -> tuple[Digraph, int]:
    """Largest ``tau <= delta`` admitting a ``tau``-regular spanning subgraph, found by flow."""
    n = g.n
    pair = BipartitePair(n, g.out_rows)
    tau = semidegrees(g).min_semidegree if n else 0
    zeros = (0,) * n
    while tau > 0:
        sub = prescribed_subgraph(pair, DegreePrescription(tau, zeros, zeros))
        if sub.feasible:
            rows = [0] * n
            for a, b in sub.edges:
                rows[a] |= 1 << b
            return Digraph(n, rows), tau
        tau -= 1
    return Digraph(n, [0] * n), 0


@dataclass
class Verdict:
    valid: bool
    violation: str | None = None


def verify_decomposition(g: Digraph, cycles: Sequence[Sequence[int]]) -> Verdict:
    """Each sequence is a Hamilton cycle of ``g`` and no edge is used twice."""
    n = g.n
    used: dict[tuple[int, int], int] = {}
    for idx, cyc in enumerate(cycles):
        cyc = list(cyc)
        if len(cyc) != n or sorted(cyc) != list(range(n)):
            return Verdict(False, f"cycle {idx} is not a permutation of the {n} vertices")
        for i in range(n):
            e = (cyc[i], cyc[(i + 1) % n])
            if not g.has_edge(*e):
                return Verdict(False, f"cycle {idx} uses {e[0]}->{e[1]}, which is not an edge")
            if e in used:
                return Verdict(False, f"edge {e[0]}->{e[1]} appears in cycles {used[e]} and {idx}")
            used[e] = idx
    return Verdict(True, None)


@dataclass
class DecompositionReport:
    n: int
    cycles: list[list[int]]
    leftover_edges: int
    reserve_residue: int
    provenance: list[dict]
    stats: dict
    fraction: float

    def to_dict(self) -> dict:
        return {
            "cycles": self.cycles,
            "fraction": self.fraction,
            "leftover_edges": self.leftover_edges,
            "n": self.n,
            "provenance": self.provenance,
            "reserve_residue": self.reserve_residue,
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DecompositionReport":
        d = json.loads(text)
        return cls(d["n"], d["cycles"], d["leftover_edges"], d["reserve_residue"],
                   d.get("provenance", []), d.get("stats", {}), d["fraction"])


def _as_sequence(succ: Sequence[int]) -> list[int]:
    seq = [0]
    v = succ[0]
    while v != 0:
        seq.append(v)
        v = succ[v]
    return seq


def almost_hamilton_decomposition(g: Digraph, cfg: DecomposerConfig = DecomposerConfig()) -> DecompositionReport:
    n = g.n
    prof = semidegrees(g)
    warnings = []
    if n and prof.min_semidegree < 3 * n / 8:
        warnings.append(f"minimum semidegree {prof.min_semidegree} is below 3n/8")
        log.warning(warnings[-1])
    seed = cfg.seed
    # a near-regular reserve keeps the regular core as dense as possible
    k = cfg.gamma * prof.min_semidegree
    tight = (math.floor(k), math.ceil(k) + 1)
    core = reserve_g = None
    for target, note in ((tight, "split, tight window"), (None, "split")):
        try:
            core, reserve_g = reserve_split(g, cfg.gamma, derive_seed(seed, 1), cfg.slack, target=target)
            reserve_note = note
            break
        except DegreeWindowUnreachable as exc:
            reserve_note = f"empty ({exc})"
    if core is None:
        core, reserve_g = g, Digraph(n, [0] * n)
    reserve_initial = reserve_g.num_edges
    regular, tau = regular_spanning_subgraph(core)
    trimmed = [(u, v) for u, v in core.edges() if not regular.has_edge(u, v)]
    reserve = ReserveGraph(n, reserve_g.edges() + trimmed, floor=0)
    core_rows = list(regular.out_rows)

    cycles: list[list[int]] = []
    provenance: list[dict] = []
    failures: list[str] = []
    merge_total = MergeStats()
    resamples = 0
    factors_drawn = 0
    streak = 0
    attempt = 0
    cluster_of = [0] * n
    stop_reason = "core exhausted"
    while tau > 0:
        if streak >= cfg.max_failure_streak:
            stop_reason = "failure streak"
            break
        attempt += 1
        core_g = Digraph(n, core_rows)
        steps = int(cfg.chain_steps_per_edge * core_g.num_edges)
        params = FewCycleParams(cycle_cap=cfg.cycle_cap, max_resamples=cfg.max_resamples, chain_steps=steps)
        fstats: dict = {}
        try:
            f = few_cycle_one_factor(core_g, None, params, derive_seed(seed, 2, attempt), stats=fstats)
        except ResampleBudgetExhausted as exc:
            resamples += fstats.get("resamples", 0)
            failures.append(f"factor {attempt}: {exc}")
            streak += 1
            continue
        resamples += fstats.get("resamples", 0)
        factors_drawn += 1
        ms = MergeStats()
        k = count_cycles(f.successor)
        try:
            if k == 1:
                f_new, res_new = f, reserve
            else:
                f_new, res_new = merge_cycles(f, reserve, cluster_of, cluster_succ={0: 0},
                                              budget=cfg.budget_per_cycle * k, stats=ms)
        except (MergeStuck, BudgetExceeded, ReserveDepleted, NoClosingEdge) as exc:
            failures.append(f"merge {attempt} ({k} cycles): {type(exc).__name__}: {exc}")
            streak += 1
            continue
        seq = _as_sequence(f_new.successor)
        if len(seq) != n:
            failures.append(f"merge {attempt}: result is not a Hamilton cycle")
            streak += 1
            continue
        streak = 0
        for field_ in ("steps", "extensions", "direct_closures", "rotations", "link_attempts", "new_edges", "credited"):
            setattr(merge_total, field_, getattr(merge_total, field_) + getattr(ms, field_))
        factor_edges = set(f.edges())
        from_reserve = sum(1 for e in f_new.edges() if e not in factor_edges)
        for x, y in f.edges():
            core_rows[x] &= ~(1 << y)
        reserve = res_new
        tau -= 1
        cycles.append(seq)
        provenance.append({"factor_cycles": k, "factor_edges": n - from_reserve, "reserve_edges": from_reserve})

    verdict = verify_decomposition(g, cycles)
    if not verdict.valid:
        raise HamDecompError(f"internal: emitted cycles fail verification: {verdict.violation}")
    leftover = sum(r.bit_count() for r in core_rows)
    residue = reserve.num_edges
    half = (n - 1) // 2
    stats = {
        "factors_drawn": factors_drawn,
        "failures": failures,
        "merge": {
            "credited": merge_total.credited,
            "direct_closures": merge_total.direct_closures,
            "extensions": merge_total.extensions,
            "link_attempts": merge_total.link_attempts,
            "new_edges": merge_total.new_edges,
            "rotations": merge_total.rotations,
            "steps": merge_total.steps,
        },
        "regular_degree": len(cycles) + tau,
        "reserve": reserve_note,
        "reserve_initial_edges": reserve_initial,
        "resamples": resamples,
        "stop_reason": stop_reason,
        "trimmed_edges": len(trimmed),
        "warnings": warnings,
    }
    fraction = len(cycles) / half if half > 0 else 0.0
    return DecompositionReport(n, cycles, leftover, residue, provenance, stats, fraction)


def check_conservation(g: Digraph, report: DecompositionReport) -> bool:
    return g.num_edges == n_cycle_edges(report) + report.leftover_edges + report.reserve_residue


def n_cycle_edges(report: DecompositionReport) -> int:
    return sum(len(c) for c in report.cycles)

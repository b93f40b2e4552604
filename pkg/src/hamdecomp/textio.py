"""Plain-text formats.

Graphs: first line ``n m``, then ``m`` lines ``u v``; ``#`` starts a comment;
LF line endings.  Factors reuse the graph format with one ``x succ(x)`` line
per vertex.  Partitions are ``cluster_id vertex_id`` lines and reduced
multidigraphs are an ``L k`` header followed by ``i j mult`` lines.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .errors import InputError
from .graph import Digraph, OrientedGraph, build_oriented


def _data_lines(text: str) -> list[list[str]]:
    rows = []
    for raw in text.split("\n"):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def _ints(fields: list[str], count: int, lineno: int) -> list[int]:
    if len(fields) != count:
        raise InputError(f"line {lineno}: expected {count} integers, got {len(fields)}")
    try:
        return [int(f) for f in fields]
    except ValueError as exc:
        raise InputError(f"line {lineno}: {exc}") from None


def format_graph(g: Digraph) -> str:
    edges = g.edges()
    out = [f"{g.n} {len(edges)}"]
    out.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(out) + "\n"


def parse_graph(text: str, oriented: bool = True) -> Digraph:
    rows = _data_lines(text)
    if not rows:
        raise InputError("empty graph file")
    n, m = _ints(rows[0], 2, 1)
    if n < 0 or m < 0:
        raise InputError("negative header values")
    if len(rows) - 1 != m:
        raise InputError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = [tuple(_ints(r, 2, i + 2)) for i, r in enumerate(rows[1:])]
    if oriented:
        return build_oriented(n, edges)
    return Digraph.from_edges(n, edges)


def write_graph(g: Digraph, path: str | Path) -> None:
    Path(path).write_bytes(format_graph(g).encode())


def read_graph(path: str | Path, oriented: bool = True) -> Digraph:
    return parse_graph(Path(path).read_text(), oriented=oriented)


def format_factor(successor: Iterable[int]) -> str:
    succ = list(successor)
    lines = [f"{len(succ)} {len(succ)}"] + [f"{x} {y}" for x, y in enumerate(succ)]
    return "\n".join(lines) + "\n"


def parse_factor(text: str) -> list[int]:
    rows = _data_lines(text)
    if not rows:
        raise InputError("empty factor file")
    n, m = _ints(rows[0], 2, 1)
    if m != n or len(rows) - 1 != n:
        raise InputError("a factor lists exactly one successor per vertex")
    succ = [-1] * n
    for i, r in enumerate(rows[1:]):
        x, y = _ints(r, 2, i + 2)
        if not (0 <= x < n and 0 <= y < n) or succ[x] != -1:
            raise InputError(f"line {i + 2}: bad or repeated entry")
        succ[x] = y
    if sorted(succ) != list(range(n)):
        raise InputError("successor map is not a permutation")
    return succ


def format_partition(clusters: list[list[int]]) -> str:
    return "".join(f"{cid} {v}\n" for cid, cl in enumerate(clusters) for v in cl)


def parse_partition(text: str) -> list[list[int]]:
    groups: dict[int, list[int]] = {}
    for i, r in enumerate(_data_lines(text)):
        cid, v = _ints(r, 2, i + 1)
        groups.setdefault(cid, []).append(v)
    if sorted(groups) != list(range(len(groups))):
        raise InputError("cluster ids must be 0..L-1")
    return [groups[c] for c in range(len(groups))]


def format_multidigraph(L: int, mult: dict[tuple[int, int], int]) -> str:
    items = sorted((k, v) for k, v in mult.items() if v > 0)
    lines = [f"{L} {len(items)}"] + [f"{i} {j} {k}" for (i, j), k in items]
    return "\n".join(lines) + "\n"


def parse_multidigraph(text: str) -> tuple[int, dict[tuple[int, int], int]]:
    rows = _data_lines(text)
    if not rows:
        raise InputError("empty multidigraph file")
    L, k = _ints(rows[0], 2, 1)
    if len(rows) - 1 != k:
        raise InputError("entry count does not match header")
    mult = {}
    for idx, r in enumerate(rows[1:]):
        i, j, c = _ints(r, 3, idx + 2)
        if not (0 <= i < L and 0 <= j < L) or c < 0:
            raise InputError(f"line {idx + 2}: bad entry")
        mult[(i, j)] = c
    return L, mult


__all__ = [
    "format_graph", "parse_graph", "write_graph", "read_graph",
    "format_factor", "parse_factor", "format_partition", "parse_partition",
    "format_multidigraph", "parse_multidigraph", "OrientedGraph",
]

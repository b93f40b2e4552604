"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .decomposer import DecomposerConfig, almost_hamilton_decomposition, verify_decomposition
from .errors import HamDecompError, InfeasibleDegreeWindow, InputError
from .factorizer import BipartiteGraph, double_cover, maximum_matching
from .graph import (
    circulant_tournament,
    random_almost_regular_oriented,
    random_regular_tournament,
    semidegrees,
)
from .oracles import (
    enumerate_regular_tournaments,
    exhaustive_hamilton_decomposition,
    matching_count_bounds,
)
from .textio import format_graph, parse_graph

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _emit(args, text: str) -> bytes:
    data = text.encode()
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return data


def _manifest(args, params: dict, inputs: dict, output: bytes, started: float) -> None:
    man = {
        "command": args.command,
        "params": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "inputs": inputs,
        "output_sha256": _digest(output),
        "wall_clock_s": round(time.perf_counter() - started, 6),
    }
    text = _dumps(man)
    if args.out:
        Path(str(args.out) + ".manifest.json").write_bytes(text.encode())
    else:
        sys.stderr.write(text)


def _read(path: str) -> tuple[str, dict]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    return raw.decode(), {path: _digest(raw)}


def _require_seed(args) -> int:
    if args.seed is None:
        raise CliError(f"{args.command} is randomized: --seed is required")
    return args.seed


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    started = time.perf_counter()
    if args.n is None:
        raise CliError("--n is required")
    params = {"kind": args.kind, "n": args.n}
    if args.kind == "circulant":
        conn = [int(x) for x in args.conn.split(",")] if args.conn else list(range(1, (args.n - 1) // 2 + 1))
        params["conn"] = conn
        g = circulant_tournament(args.n, conn)
    elif args.kind == "regular":
        params["seed"] = _require_seed(args)
        g = random_regular_tournament(args.n, seed=args.seed)
    else:
        if args.alpha is None or args.eta is None:
            raise CliError("almost-regular needs --alpha and --eta")
        params.update(alpha=args.alpha, eta=args.eta, seed=_require_seed(args))
        try:
            g = random_almost_regular_oriented(args.n, args.alpha, args.eta, seed=args.seed)
        except InfeasibleDegreeWindow as exc:
            raise CliError(str(exc)) from None
    data = _emit(args, format_graph(g))
    prof = semidegrees(g)
    params["semidegree_window"] = [prof.min_semidegree, prof.max_semidegree]
    _manifest(args, params, {}, data, started)
    return EXIT_OK


def cmd_decompose(args) -> int:
    started = time.perf_counter()
    text, inputs = _read(args.graph)
    g = parse_graph(text)
    cfg = DecomposerConfig(gamma=args.gamma, seed=_require_seed(args))
    report = almost_hamilton_decomposition(g, cfg)
    verdict = verify_decomposition(g, report.cycles)
    if args.format == "text":
        lines = [f"n {report.n}", f"cycles {len(report.cycles)}", f"fraction {report.fraction:.6f}",
                 f"leftover_edges {report.leftover_edges}", f"reserve_residue {report.reserve_residue}"]
        lines += [" ".join(map(str, c)) for c in report.cycles]
        out = "\n".join(lines) + "\n"
    else:
        out = report.to_json()
    data = _emit(args, out)
    _manifest(args, {"gamma": args.gamma, "format": args.format}, inputs, data, started)
    if not verdict.valid:
        print(f"internal verification failure: {verdict.violation}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_verify(args) -> int:
    gtext, _ = _read(args.graph)
    rtext, _ = _read(args.report)
    g = parse_graph(gtext)
    try:
        cycles = json.loads(rtext).get("cycles", []) if rtext.strip() else []
    except (json.JSONDecodeError, AttributeError) as exc:
        raise CliError(f"report is not a JSON object: {exc}") from None
    if not isinstance(cycles, list) or not all(isinstance(c, list) for c in cycles):
        raise CliError("report cycles must be a list of vertex lists")
    verdict = verify_decomposition(g, cycles)
    if verdict.valid:
        print(f"valid: {len(cycles)} edge-disjoint Hamilton cycles")
        return EXIT_OK
    print(f"invalid: {verdict.violation}")
    return EXIT_VERIFY


def _decomposes(rows_n):
    from .graph import OrientedGraph

    n, rows = rows_n
    return exhaustive_hamilton_decomposition(OrientedGraph(n, rows)) is not None


def cmd_kelly_check(args) -> int:
    started = time.perf_counter()
    if args.n not in (3, 5, 7):
        raise CliError("kelly-check supports --n 3, 5 or 7")
    ts = enumerate_regular_tournaments(args.n)
    jobs = [(t.n, list(t.out_rows)) for t in ts]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            ok = sum(ex.map(_decomposes, jobs, chunksize=64))
    else:
        ok = sum(map(_decomposes, jobs))
    row = {"n": args.n, "enumerated": len(ts), "decomposed": ok}
    if args.format == "json":
        out = _dumps(row)
    else:
        out = f"n={args.n}  enumerated={len(ts)}  decomposed={ok}  ({ok}/{len(ts)})\n"
    data = _emit(args, out)
    _manifest(args, {"n": args.n, "jobs": args.jobs}, {}, data, started)
    return EXIT_OK if ok == len(ts) else EXIT_VERIFY


def cmd_bounds(args) -> int:
    started = time.perf_counter()
    text, inputs = _read(args.graph)
    g = parse_graph(text, oriented=False)
    b = matching_count_bounds(double_cover(g))
    row = {
        "bregman_upper": b.bregman_upper,
        "exact": b.exact,
        "rho": b.rho,
        "sandwich": b.sandwich_holds(),
        "vdw_lower": b.vdw_lower,
    }
    if args.format == "json":
        out = _dumps(row)
    else:
        fmt = lambda v: "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))
        out = (f"lower {fmt(b.vdw_lower)}\nexact {fmt(b.exact)}\nupper {fmt(b.bregman_upper)}\n"
               f"sandwich {'holds' if row['sandwich'] else 'FAILS'}\n")
    data = _emit(args, out)
    _manifest(args, {"format": args.format}, inputs, data, started)
    return EXIT_OK if row["sandwich"] else EXIT_VERIFY


def _bench_once(task):
    suite, size, seed = task
    from .flow import random_balanced_prescription, random_super_regular_pair, prescribed_subgraph
    from .rng import derive_seed
    from .rotation import hypothesis_rotation_instance, rotation_close

    extra = {}
    if suite == "matching":
        from .rng import make_rng

        rng = make_rng(seed, 91)
        rows = [0] * size
        for _ in range(10):
            for x, y in enumerate(rng.permutation(size).tolist()):
                rows[x] |= 1 << y
        t0 = time.perf_counter()
        maximum_matching(BipartiteGraph(size, size, rows))
    elif suite == "flow":
        pair = random_super_regular_pair(size, 0.3, 0.005, seed)
        presc = random_balanced_prescription(size, int(0.3 * size * 0.9), max(1, int(0.01 * size)),
                                             derive_seed(seed, 1))
        t0 = time.perf_counter()
        prescribed_subgraph(pair, presc)
    elif suite == "rotation":
        inst, _ = hypothesis_rotation_instance(size, 0.5, 0.25, 0.8, seed)
        t0 = time.perf_counter()
        rotation_close(inst)
    elif suite == "decompose":
        g = random_regular_tournament(size, seed=seed)
        t0 = time.perf_counter()
        rep = almost_hamilton_decomposition(g, DecomposerConfig(seed=seed))
        extra["fraction"] = rep.fraction
    else:
        raise InputError(f"unknown suite {suite}")
    return time.perf_counter() - t0, extra


def cmd_bench(args) -> int:
    started = time.perf_counter()
    seed = _require_seed(args)
    defaults = {"matching": [100, 1000], "flow": [100, 400], "rotation": [16, 32, 64], "decompose": [25, 51, 101]}
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else defaults[args.suite]
    rows = []
    for size in sizes:
        tasks = [(args.suite, size, seed + rep) for rep in range(args.reps)]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as ex:
                results = list(ex.map(_bench_once, tasks))
        else:
            results = [_bench_once(t) for t in tasks]
        row = {"suite": args.suite, "size": size, "median_s": statistics.median(r[0] for r in results),
               "reps": args.reps}
        fr = [r[1]["fraction"] for r in results if "fraction" in r[1]]
        if fr:
            row["fractions"] = fr
        rows.append(row)
    if args.format == "json":
        out = "".join(_dumps(r) for r in rows)
    else:
        out = "".join(f"{r['suite']}\t{r['size']}\t{r['median_s']:.6f}" +
                      (f"\t{statistics.mean(r['fractions']):.4f}" if "fractions" in r else "") + "\n" for r in rows)
    data = _emit(args, out)
    _manifest(args, {"suite": args.suite, "sizes": sizes, "reps": args.reps}, {}, data, started)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamdecomp", description="Hamilton cycle packing experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write primary output here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default="text")
        if seed:
            sp.add_argument("--seed", type=int)

    g = sub.add_parser("gen", help="generate a graph")
    g.add_argument("--kind", choices=("regular", "almost-regular", "circulant"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--conn", help="comma-separated connection set for circulant graphs")
    common(g)
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("decompose", help="pack edge-disjoint Hamilton cycles")
    d.add_argument("graph")
    d.add_argument("--gamma", type=float, default=0.12)
    common(d)
    d.set_defaults(func=cmd_decompose, format="json")

    v = sub.add_parser("verify", help="re-check a decomposition report")
    v.add_argument("graph")
    v.add_argument("report")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kelly-check", help="decompose every regular tournament of a small order")
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--jobs", type=int, default=1)
    common(k, seed=False)
    k.set_defaults(func=cmd_kelly_check)

    b = sub.add_parser("bounds", help="matching-count bounds of the double cover")
    b.add_argument("graph")
    common(b, seed=False)
    b.set_defaults(func=cmd_bounds)

    be = sub.add_parser("bench", help="timing sweeps")
    be.add_argument("--suite", choices=("matching", "flow", "rotation", "decompose"), required=True)
    be.add_argument("--sizes")
    be.add_argument("--reps", type=int, default=5)
    be.add_argument("--jobs", type=int, default=1)
    common(be)
    be.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HamDecompError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``vglcs <subcommand> ...``.

Exit status is 0 on success (including a negative verification verdict),
1 when the input cannot be processed (bad file, dp with m != 2, size cap),
and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .core import Heuristic, InstanceFormatError, Semantics, read_instance, save_instance, verify_solution
from .exact import CapExceeded
from .genbench import (
    ALGORITHMS,
    GenSpec,
    default_config,
    generate_instance,
    full_grid,
    run_benchmark,
    solve_named,
    summary_path,
)
from .ilp import build_ilp_model, write_lp_text
from .stategraph import rooted_subgraph_dot

ALGO_CHOICES = [a.lower().replace("_", "-") for a in ALGORITHMS]
H_CHOICES = [h.value for h in Heuristic]


class PreconditionError(Exception):
    pass


def _load(path):
    try:
        return read_instance(path)
    except FileNotFoundError:
        raise PreconditionError(f"{path}: no such file") from None
    except InstanceFormatError as e:
        raise PreconditionError(f"{path}: {e}") from None


def _heuristic(name: str | None):
    return None if name is None else Heuristic(name)


def _solver_config(args):
    cfg = default_config(args.algo)
    if cfg is None:
        return None
    fields = {
        "beta": args.beta,
        "beta_bwd": args.beta_bwd,
        "sources_from_r": args.sources,
        "beam_iters": args.iters,
        "heuristic": _heuristic(args.h),
        "heuristic_prime": _heuristic(args.hprime),
        "time_limit_s": args.time_limit,
        "semantics": Semantics(args.semantics) if args.semantics else None,
        "seed": args.seed,
    }
    try:
        return replace(cfg, **{k: v for k, v in fields.items() if v is not None})
    except ValueError as e:
        raise SystemExit(_usage(args, str(e))) from None


def _solve_one(job):
    path, algo, cfg = job
    inst = _load(path)
    if algo in ("dp", "dp-ismq") and inst.m != 2:
        raise PreconditionError(f"{path}: --algo {algo} needs exactly 2 sequences, got {inst.m}")
    t0 = time.perf_counter()
    try:
        sol, trace = solve_named(algo, inst, cfg)
    except CapExceeded as e:
        raise PreconditionError(f"{path}: {e}") from None
    return sol, trace, time.perf_counter() - t0


def cmd_solve(args) -> int:
    if args.trace and len(args.files) > 1:
        raise SystemExit(_usage(args, "--trace needs a single instance file"))
    cfg = _solver_config(args)
    jobs = [(f, args.algo, cfg) for f in args.files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_solve_one, jobs))
    else:
        results = [_solve_one(j) for j in jobs]
    for f, (sol, trace, dt) in zip(args.files, results):
        if len(args.files) > 1:
            print(f"instance: {f}")
        print(f"solution: {sol.text}")
        print(f"length: {len(sol)}")
        for i, emb in enumerate(sol.embeddings, 1):
            print(f"embedding {i}: {' '.join(map(str, emb))}")
        # runtime varies run to run; keep it off stdout so stdout is reproducible
        print(f"{f}: runtime {dt:.3f} s", file=sys.stderr)
        if args.trace and trace is not None:
            trace.write(args.trace)
    return 0


def cmd_verify(args) -> int:
    inst = _load(args.file)
    rep = verify_solution(inst, args.text, Semantics(args.semantics))
    print(f"feasible: {'yes' if rep.feasible else 'no'}")
    for i, entry in enumerate(rep.per_sequence, 1):
        if isinstance(entry, tuple):
            print(f"sequence {i}: {' '.join(map(str, entry))}")
        else:
            print(f"sequence {i}: no position for character {entry}")
    return 0


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(args.m, args.n, args.sigma, args.count, args.seed)
    except ValueError as e:
        raise PreconditionError(str(e)) from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(spec.count):
        path = out / f"{spec.instance_id(k)}.vglcs"
        save_instance(generate_instance(spec, k), path)
        print(path)
    return 0


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_graph(args) -> int:
    inst = _load(args.file)
    _emit(rooted_subgraph_dot(inst, max_nodes=args.max_nodes), args.output)
    return 0


def cmd_export_ilp(args) -> int:
    inst = _load(args.file)
    if inst.m != 2:
        raise PreconditionError(f"{args.file}: the ILP model needs exactly 2 sequences, got {inst.m}")
    _emit(write_lp_text(build_ilp_model(inst)), args.output)
    return 0


def cmd_bench(args) -> int:
    if args.full_grid:
        grid = full_grid(args.count, args.seed)
    else:
        try:
            grid = [GenSpec(m, n, s, args.count, args.seed) for m in args.m for n in args.n for s in args.sigma]
        except ValueError as e:
            raise PreconditionError(str(e)) from None
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGO_CHOICES]
    if bad:
        raise SystemExit(_usage(args, f"unknown algorithm(s): {', '.join(bad)}"))
    try:
        records = run_benchmark(grid, algos, args.out, jobs=args.jobs, time_limit=args.time_limit)
    except OSError as e:
        raise PreconditionError(str(e)) from None
    print(f"{len(records)} records -> {args.out}")
    print(f"summary -> {summary_path(args.out)}")
    return 0


def _usage(args, msg: str) -> int:
    args._parser.print_usage(sys.stderr)
    print(f"{args._parser.prog}: error: {msg}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vglcs", description="Variable gapped LCS solvers.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one or more instance files")
    s.add_argument("files", nargs="+")
    s.add_argument("--algo", choices=ALGO_CHOICES, default="imsbs")
    s.add_argument("--beta", type=int)
    s.add_argument("--beta-bwd", type=int)
    s.add_argument("--sources", type=int)
    s.add_argument("--iters", type=int)
    s.add_argument("--h", choices=H_CHOICES)
    s.add_argument("--hprime", choices=H_CHOICES)
    s.add_argument("--time-limit", type=float)
    s.add_argument("--semantics", choices=[x.value for x in Semantics])
    s.add_argument("--seed", type=int)
    s.add_argument("--trace", help="write the per-iteration trace as JSON lines")
    s.add_argument("--jobs", type=int, default=1, help="worker processes across files")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a candidate string")
    v.add_argument("file")
    v.add_argument("--text", required=True)
    v.add_argument("--semantics", choices=[x.value for x in Semantics], default="leftmost")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="write random instances")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=int, required=True)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("graph", help="DOT dump of the rooted state subgraphs")
    d.add_argument("file")
    d.add_argument("--max-nodes", type=int, default=200)
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_graph)

    e = sub.add_parser("export-ilp", help="write the two-sequence ILP model in LP format")
    e.add_argument("file")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export_ilp)

    b = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    b.add_argument("--full-grid", action="store_true", help="use the full 4 x 4 x 2 grid")
    b.add_argument("--m", type=int, nargs="+", default=[2])
    b.add_argument("--n", type=int, nargs="+", default=[50])
    b.add_argument("--sigma", type=int, nargs="+", default=[2])
    b.add_argument("--count", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algos", default="bs,imsbs")
    b.add_argument("--time-limit", type=float)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    for sp in (s, v, g, d, e, b):
        sp.set_defaults(_parser=sp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as e:
        print(f"vglcs: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

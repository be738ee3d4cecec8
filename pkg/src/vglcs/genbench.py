"""Random instance generator and the CSV benchmark harness.

Instances are drawn from a Philox counter-based stream keyed by
``(STREAM_VERSION, seed, index)``, so an instance id always maps to the same
sequences and gaps.  Bump ``STREAM_VERSION`` only if the sampling recipe
changes; old ids then stop being reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from string import ascii_uppercase

import numpy as np

from .core import Instance, Semantics, Solution, SolverConfig
from .exact import brute_force_existential, brute_force_leftmost, dp_basic, dp_ismq
from .imsbs import bs_baseline, imsbs_solve, preset

STREAM_VERSION = 1

GRID_N = (50, 100, 200, 500)
GRID_M = (2, 3, 5, 10)
GRID_SIGMA = (2, 4)

CSV_HEADER = ["instance", "algorithm", "seed", "m", "n", "sigma", "objective", "runtime_s", "config"]
SUMMARY_HEADER = ["group", "algorithm", "mean_objective", "mean_runtime_s"]


@dataclass(frozen=True)
class GenSpec:
    m: int
    n: int
    sigma_size: int
    count: int = 10
    seed: int = 0

    def __post_init__(self):
        for name in ("m", "n", "sigma_size", "count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.sigma_size > 26:
            raise ValueError("sigma_size is limited to 26 letters")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def group(self) -> str:
        return f"m{self.m}_n{self.n}_s{self.sigma_size}"

    def instance_id(self, index: int) -> str:
        return f"rand_{self.group}_i{index}"

    @property
    def gap_range(self) -> tuple[int, int]:
        return self.sigma_size // 2, (3 * self.sigma_size) // 2


def _stream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([STREAM_VERSION, seed, index])
    return np.random.Generator(np.random.Philox(ss))


def generate_instance(spec: GenSpec, index: int) -> Instance:
    rng = _stream(spec.seed, index)
    letters = np.array(list(ascii_uppercase[: spec.sigma_size]))
    codes = rng.integers(0, spec.sigma_size, size=(spec.m, spec.n))
    lo, hi = spec.gap_range
    gaps = rng.integers(lo, hi + 1, size=(spec.m, spec.n))
    seqs = tuple("".join(letters[row]) for row in codes)
    return Instance(seqs, tuple(tuple(int(g) for g in row) for row in gaps))


def generate_group(spec: GenSpec) -> list[tuple[str, Instance]]:
    return [(spec.instance_id(k), generate_instance(spec, k)) for k in range(spec.count)]


def full_grid(count: int = 10, seed: int = 0) -> list[GenSpec]:
    """The full 4 x 4 x 2 grid (320 instances at the default count)."""
    return [GenSpec(m, n, s, count, seed) for m in GRID_M for n in GRID_N for s in GRID_SIGMA]


# --------------------------------------------------------------------------
# named algorithms
# --------------------------------------------------------------------------

ALGORITHMS = ("BS", "IMSBS", "IMSBS_GREEDY", "DP", "DP_ISMQ", "BRUTE_EX", "BRUTE_LM")
TWO_ONLY = ("DP", "DP_ISMQ")


def algo_key(name: str) -> str:
    key = name.upper().replace("-", "_")
    if key not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}")
    return key


def default_config(name: str) -> SolverConfig | None:
    key = algo_key(name)
    if key in ("BS", "IMSBS", "IMSBS_GREEDY"):
        return preset(key)
    return None


def solve_named(name: str, inst: Instance, cfg: SolverConfig | None = None):
    """Run algorithm ``name``; returns (Solution, RunTrace or None)."""
    key = algo_key(name)
    if key == "BS":
        return bs_baseline(inst, cfg or preset("BS"))
    if key in ("IMSBS", "IMSBS_GREEDY"):
        return imsbs_solve(inst, cfg or preset(key))
    if key == "DP":
        return dp_basic(inst), None
    if key == "DP_ISMQ":
        return dp_ismq(inst), None
    if key == "BRUTE_EX":
        return brute_force_existential(inst), None
    return brute_force_leftmost(inst), None


def solution_semantics(name: str, cfg: SolverConfig | None) -> Semantics:
    """Semantics a solver's output is guaranteed under."""
    key = algo_key(name)
    if key in ("DP", "DP_ISMQ", "BRUTE_EX"):
        return Semantics.EXISTENTIAL
    if key == "BRUTE_LM":
        return Semantics.LEFTMOST
    return (cfg or preset(key)).semantics


def fingerprint(name: str, cfg: SolverConfig | None) -> str:
    payload = {"algorithm": algo_key(name), "config": cfg.to_dict() if cfg else None}
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha1(blob).hexdigest()[:12]


# --------------------------------------------------------------------------
# harness
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    algorithm: str
    seed: int
    m: int
    n: int
    sigma: int
    objective: int
    runtime_s: float
    config: str

    def __post_init__(self):
        if self.objective < 0 or self.runtime_s < 0:
            raise ValueError("objective and runtime must be non-negative")

    @property
    def group(self) -> str:
        return f"m{self.m}_n{self.n}_s{self.sigma}"

    def row(self) -> list:
        return [getattr(self, k) for k in CSV_HEADER]


def _run_cell(cell) -> BenchRecord:
    spec, index, algo, cfg = cell
    inst = generate_instance(spec, index)
    t0 = time.perf_counter()
    sol: Solution = solve_named(algo, inst, cfg)[0]
    dt = time.perf_counter() - t0
    return BenchRecord(
        spec.instance_id(index),
        algo,
        spec.seed,
        spec.m,
        spec.n,
        spec.sigma_size,
        len(sol),
        round(dt, 6),
        fingerprint(algo, cfg),
    )


def plan_cells(grid, algos, time_limit: float | None = None, overrides: dict | None = None) -> list:
    keys = [algo_key(a) for a in algos]
    cells = []
    for spec in grid:
        for key in keys:
            if key in TWO_ONLY and spec.m != 2:
                continue
            cfg = default_config(key)
            if cfg is not None:
                if overrides:
                    cfg = replace(cfg, **overrides)
                if time_limit is not None:
                    cfg = replace(cfg, time_limit_s=time_limit)
            for index in range(spec.count):
                cells.append((spec, index, key, cfg))
    cells.sort(key=lambda c: (grid.index(c[0]), c[1], keys.index(c[2])))
    return cells


def summarize(records: list[BenchRecord]) -> list[tuple[str, str, float, float]]:
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.group, r.algorithm), []).append(r)
    return [
        (g, a, sum(r.objective for r in rs) / len(rs), sum(r.runtime_s for r in rs) / len(rs))
        for (g, a), rs in groups.items()
    ]


def write_records(records: list[BenchRecord], out) -> None:
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())


def write_summary(rows, out) -> None:
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for g, a, obj, rt in rows:
            w.writerow([g, a, repr(obj), repr(rt)])


def read_records(path) -> list[BenchRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    ints = ("seed", "m", "n", "sigma", "objective")
    return [
        BenchRecord(**{k: (int(v) if k in ints else float(v) if k == "runtime_s" else v) for k, v in r.items()})
        for r in rows
    ]


def summary_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))


def run_benchmark(
    grid: list[GenSpec],
    algos: list[str],
    out,
    *,
    jobs: int = 1,
    time_limit: float | None = None,
    overrides: dict | None = None,
    summary_out=None,
) -> list[BenchRecord]:
    """Run every (instance, algorithm) cell and write the raw and summary CSVs.

    Rows come out in grid order, then instance index, then ``algos`` order,
    whatever ``jobs`` is.  DP variants are skipped for groups with m != 2.
    """
    out = Path(out)
    if not out.parent.exists() or not os.access(out.parent, os.W_OK):
        raise OSError(f"cannot write to {out}")
    cells = plan_cells(list(grid), algos, time_limit, overrides)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_run_cell, cells))
    else:
        records = [_run_cell(c) for c in cells]
    write_records(records, out)
    write_summary(summarize(records), summary_out or summary_path(out))
    return records


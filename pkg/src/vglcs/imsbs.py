"""Iterative multi-source beam search.

Each outer iteration takes the best few roots from a global pool, extends
them leftwards with a backward beam search, runs one forward rooted beam
search from all of them, and feeds every complete node back into the pool as
fresh roots (closest common letters, gaps ignored).
"""

from __future__ import annotations

import heapq
import json
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .beam import backward_refine, rooted_beam_search
from .core import Heuristic, Instance, Semantics, Solution, SolverConfig, StateNode, verify_solution
from .heuristics import score
from .stategraph import build_plain_next, build_succ, initial_roots, roots_from_positions

log = logging.getLogger(__name__)

PRESETS = ("BS", "IMSBS", "IMSBS_GREEDY")


def preset(name: str, **overrides) -> SolverConfig:
    key = name.upper().replace("-", "_")
    if key == "BS":
        cfg = SolverConfig(
            beta=10_000,
            heuristic=Heuristic.HPROB,
            heuristic_prime=Heuristic.UB2,
            beam_iters=1,
            backward=False,
        )
    elif key == "IMSBS":
        cfg = SolverConfig()
    elif key == "IMSBS_GREEDY":
        cfg = SolverConfig(beta=1, beam_iters=10_000)
    else:
        raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    return replace(cfg, **overrides) if overrides else cfg


class RootPool:
    """Max-priority pool of roots keyed by h' with a permanent seen-set."""

    def __init__(self, inst: Instance, h_prime: Heuristic, k_scale: float = 1.0):
        self.inst = inst
        self.h_prime = Heuristic(h_prime)
        self.k_scale = k_scale
        self.heap: list[tuple[float, tuple[int, ...]]] = []
        self.seen: set[tuple[int, ...]] = set()

    def __len__(self) -> int:
        return len(self.heap)

    def push_many(self, positions: np.ndarray) -> int:
        """Insert unseen position vectors; returns how many were new."""
        if len(positions) == 0:
            return 0
        fresh = []
        for row in positions.tolist():
            key = tuple(row)
            if key not in self.seen:
                self.seen.add(key)
                fresh.append(key)
        if not fresh:
            return 0
        arr = np.array(fresh, dtype=np.int64)
        vals = score(self.h_prime, self.inst, arr, np.zeros(len(arr), np.int64), self.k_scale)
        for v, key in zip(vals.tolist(), fresh):
            heapq.heappush(self.heap, (-v, key))
        return len(fresh)

    def push(self, node: StateNode) -> bool:
        return self.push_many(np.array([node.pL], dtype=np.int64)) == 1

    def pop(self) -> StateNode:
        _, key = heapq.heappop(self.heap)
        return StateNode(key)

    def pop_many(self, k: int) -> list[StateNode]:
        return [self.pop() for _ in range(min(k, len(self.heap)))]


@dataclass
class RunTrace:
    records: list[dict] = field(default_factory=list)

    def add(self, **rec) -> None:
        self.records.append(rec)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())


def _accept(inst: Instance, text: str, semantics: Semantics) -> Solution | None:
    rep = verify_solution(inst, text, semantics)
    if not rep.feasible:
        log.warning("discarding candidate %r: fails %s verification", text, semantics.value)
        return None
    return Solution(text, rep.embeddings)


def imsbs_solve(inst: Instance, cfg: SolverConfig | None = None) -> tuple[Solution, RunTrace]:
    cfg = cfg or preset("IMSBS")
    trace = RunTrace()
    best = Solution.empty(inst.m)
    if cfg.beam_iters == 0:
        return best, trace
    t0 = time.monotonic()
    succ = build_succ(inst)
    pool = RootPool(inst, cfg.heuristic_prime, cfg.hprob_k_scale)
    roots = initial_roots(inst, build_plain_next(inst))
    pool.push_many(np.array([r.pL for r in roots], dtype=np.int64).reshape(-1, inst.m))
    it = 0
    rejected = 0
    while len(pool) and it < cfg.beam_iters and time.monotonic() - t0 < cfg.time_limit_s:
        selected = pool.pop_many(cfg.sources_from_r)
        if cfg.backward:
            selected = [
                backward_refine(
                    w,
                    inst,
                    cfg.beta_bwd,
                    cfg.heuristic_prime,
                    semantics=cfg.semantics,
                    k_scale=cfg.hprob_k_scale,
                    sibling_dominance=cfg.sibling_dominance,
                )
                for w in selected
            ]
        res = rooted_beam_search(
            selected,
            inst,
            succ,
            cfg.beta,
            cfg.heuristic,
            k_scale=cfg.hprob_k_scale,
            sibling_dominance=cfg.sibling_dominance,
            beam_dominance=cfg.beam_dominance,
        )
        if len(res.best_text) > len(best):
            sol = _accept(inst, res.best_text, cfg.semantics)
            if sol is None:
                rejected += 1
            else:
                best = sol
        added = 0
        if it + 1 < cfg.beam_iters and len(res.complete_pos):
            done = np.unique(res.complete_pos, axis=0)
            added = pool.push_many(roots_from_positions(inst, done))
        trace.add(
            iteration=it,
            pool_size=len(pool),
            roots=[list(w.pL) for w in selected],
            refined_lengths=[w.length for w in selected],
            forward_best=len(res.best_text),
            incumbent=len(best),
            new_roots=added,
            rejected=rejected,
            elapsed_s=round(time.monotonic() - t0, 6),
        )
        it += 1
    final = verify_solution(inst, best.text, cfg.semantics)
    if not final.feasible:  # pragma: no cover - guarded by _accept
        raise RuntimeError(f"incumbent {best.text!r} failed final verification")
    return best, trace


def bs_baseline(inst: Instance, cfg: SolverConfig | None = None) -> tuple[Solution, RunTrace]:
    """One forward pass from all initial roots, no refinement."""
    cfg = cfg or preset("BS")
    n_roots = max(len(initial_roots(inst, build_plain_next(inst))), 1)
    cfg = replace(cfg, beam_iters=1, backward=False, sources_from_r=max(cfg.sources_from_r, n_roots))
    return imsbs_solve(inst, cfg)

"""Rooted beam search over the state graph, and backward root refinement.

A beam level is held as arrays (positions, lengths) plus a parent/letter
trace per level; strings are rebuilt only for the nodes that need them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .core import (
    Heuristic,
    Instance,
    Semantics,
    Solution,
    StateNode,
    anchored_suffix_start,
    reverse_instance,
    verify_solution,
)
from .heuristics import score
from .stategraph import SuccTable, build_succ, match_letter


@dataclass
class BeamResult:
    best_text: str
    best_pos: tuple[int, ...] | None
    complete_pos: np.ndarray
    complete_len: np.ndarray
    level_best: list[int] = field(default_factory=list)
    inst: Instance | None = field(default=None, repr=False)
    _trace: "_Trace | None" = field(default=None, repr=False)
    _complete_refs: list = field(default_factory=list, repr=False)

    @cached_property
    def best(self) -> Solution:
        """The best string with LEFTMOST witnesses (raises if it has none)."""
        if self.inst is None:
            raise ValueError("result is detached from its instance")
        if not self.best_text:
            return Solution.empty(self.inst.m)
        rep = verify_solution(self.inst, self.best_text, Semantics.LEFTMOST)
        if not rep.feasible:
            raise RuntimeError(f"beam search produced an infeasible string {self.best_text!r}")
        return Solution(self.best_text, rep.embeddings)

    @property
    def complete_nodes(self) -> list[StateNode]:
        if self._trace is None:
            return []
        return [
            StateNode(tuple(int(p) for p in self.complete_pos[k]), int(self.complete_len[k]), self._trace.text(lvl, idx))
            for k, (lvl, idx) in enumerate(self._complete_refs)
        ]


class _Trace:
    def __init__(self, prefixes: list[str], alphabet: str):
        self.prefixes = prefixes
        self.alphabet = alphabet
        self.levels: list[tuple[np.ndarray, np.ndarray]] = []

    def text(self, level: int, idx: int) -> str:
        letters = []
        while level > 0:
            parent, letter = self.levels[level - 1]
            letters.append(self.alphabet[letter[idx]])
            idx = int(parent[idx])
            level -= 1
        return self.prefixes[idx] + "".join(reversed(letters))


def _beam_dominance_keep(child: np.ndarray, clen: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Mask of children not componentwise dominated by a same-length sibling."""
    keep = np.ones(len(child), dtype=bool)
    for length in np.unique(clen):
        idx = np.nonzero(clen == length)[0]
        block = child[idx]
        for s in range(0, len(idx), chunk):
            part = block[s : s + chunk]
            le = (block[None, :, :] <= part[:, None, :]).all(axis=2)
            ne = (block[None, :, :] != part[:, None, :]).any(axis=2)
            keep[idx[s : s + chunk]] &= ~(le & ne).any(axis=1)
    return keep


def _initial_beam(roots: list[StateNode], inst: Instance):
    pos, lens, prefixes = [], [], []
    for r in roots:
        if len(r.pL) != inst.m:
            raise ValueError(f"root {r.pL} has the wrong dimension")
        letter = match_letter(inst, r.pL)
        if letter is None:
            raise ValueError(f"root {r.pL} does not sit on one common letter")
        if r.length != len(r.prefix):
            raise ValueError(f"root {r.pL}: length {r.length} but prefix {r.prefix!r}")
        pos.append([p + 1 for p in r.pL])
        lens.append(r.length + 1)
        prefixes.append(r.prefix + letter)
    pos = np.array(pos, dtype=np.int32).reshape(-1, inst.m)
    lens = np.array(lens, dtype=np.int64)
    keep = kernels.dedup_rows(np.column_stack([pos.astype(np.int64), lens]))
    return pos[keep], lens[keep], [prefixes[k] for k in keep]


def rooted_beam_search(
    roots: list[StateNode],
    inst: Instance,
    succ: SuccTable | None,
    beta: int,
    h: Heuristic = Heuristic.UB2,
    *,
    k_scale: float = 1.0,
    sibling_dominance: bool = True,
    beam_dominance: bool = False,
) -> BeamResult:
    """Beam search started from the match extensions of ``roots``.

    Each root contributes the node (pL + 1, len + 1, prefix + match letter);
    the search runs until the beam is empty and returns the longest complete
    node found (first in beam order on ties) together with all complete
    nodes.
    """
    h = Heuristic(h)
    if beta < 1:
        raise ValueError("beta must be positive")
    table = (succ or build_succ(inst)).table
    m = inst.m
    if not roots:
        return BeamResult("", None, np.zeros((0, m), np.int32), np.zeros(0, np.int64), inst=inst)
    pos, lens, prefixes = _initial_beam(roots, inst)
    trace = _Trace(prefixes, inst.alphabet)
    complete_pos, complete_len, complete_refs = [], [], []
    best_len, best_ref, best_pos = 0, None, None
    level_best = []
    level = 0
    gen = np.arange(0)
    while len(pos):
        child, parent, letter, n_raw = kernels.expand_level(pos, table, sibling_dominance)
        done = np.nonzero(n_raw == 0)[0]
        if len(done):
            complete_pos.append(pos[done])
            complete_len.append(lens[done])
            complete_refs.extend((level, int(k)) for k in done)
            j = int(np.argmax(lens[done]))
            if lens[done[j]] > best_len:
                best_len = int(lens[done[j]])
                best_ref = (level, int(done[j]))
                best_pos = tuple(int(p) for p in pos[done[j]])
        level_best.append(best_len)
        if len(child) == 0:
            break
        clen = lens[parent] + 1
        keep = kernels.dedup_rows(np.column_stack([child.astype(np.int64), clen]))
        child, parent, letter, clen = child[keep], parent[keep], letter[keep], clen[keep]
        if beam_dominance:
            mask = _beam_dominance_keep(child, clen)
            child, parent, letter, clen = child[mask], parent[mask], letter[mask], clen[mask]
        val = score(h, inst, child, clen, k_scale)
        if len(gen) < len(child):
            gen = np.arange(len(child))
        keys = [gen[: len(child)], -clen] + [child[:, i] for i in range(m - 1, -1, -1)] + [-val]
        order = np.lexsort(keys)[:beta]
        pos = np.ascontiguousarray(child[order])
        lens = clen[order]
        trace.levels.append((parent[order], letter[order]))
        level += 1
    best_text = trace.text(*best_ref) if best_ref is not None else ""
    cp = np.concatenate(complete_pos) if complete_pos else np.zeros((0, m), np.int32)
    cl = np.concatenate(complete_len) if complete_len else np.zeros(0, np.int64)
    return BeamResult(best_text, best_pos, cp, cl, level_best, inst, trace, complete_refs)


def backward_refine(
    w: StateNode,
    inst: Instance,
    beta_bwd: int,
    h_prime: Heuristic = Heuristic.UB2,
    *,
    semantics: Semantics = Semantics.LEFTMOST,
    k_scale: float = 1.0,
    sibling_dominance: bool = True,
) -> StateNode:
    """Extend root ``w`` leftwards with a beam search on the reversed instance.

    The backward search starts on ``w``'s own match, so its best string read
    backwards ends with that letter.  The part before it becomes ``w``'s
    prefix, after trimming leading characters until the string can end
    exactly at ``w.pL`` in the forward direction (the reversed gap function
    is evaluated at the other end of each step, so this is not automatic).
    """
    letter = match_letter(inst, w.pL)
    if letter is None:
        raise ValueError(f"root {w.pL} does not sit on one common letter")
    rev = reverse_instance(inst)
    start = StateNode(tuple(int(n_i) - p + 1 for n_i, p in zip(inst.lengths.tolist(), w.pL)))
    res = rooted_beam_search(
        [start],
        rev,
        build_succ(rev),
        beta_bwd,
        h_prime,
        k_scale=k_scale,
        sibling_dominance=sibling_dominance,
    )
    text = res.best_text[::-1]
    if len(text) <= 1:
        return StateNode(w.pL, 0, "")
    k = anchored_suffix_start(inst, text, w.pL, semantics)
    prefix = text[k:-1]
    return StateNode(w.pL, len(prefix), prefix)

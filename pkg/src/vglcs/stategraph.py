"""Rooted state graph: successor tables, expansion, dominance and roots."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Instance, StateNode, succ_array


@dataclass(frozen=True)
class SuccTable:
    """``table[i, j, a]``: smallest q >= j with s_i[q] = a and q - j <= G_i(q).

    ``i`` is 0-based, ``j`` and the stored q are 1-based, -1 means none.
    """

    table: np.ndarray
    alphabet: str

    def lookup(self, i: int, j: int, letter: str) -> int:
        a = self.alphabet.find(letter)
        if a < 0 or j >= self.table.shape[1]:
            return -1
        return int(self.table[i, j, a])


@dataclass(frozen=True)
class PlainNextTable:
    """Same layout as :class:`SuccTable` but ignoring the gap constraints."""

    table: np.ndarray
    alphabet: str

    def lookup(self, i: int, j: int, letter: str) -> int:
        a = self.alphabet.find(letter)
        if a < 0 or j >= self.table.shape[1]:
            return -1
        return int(self.table[i, j, a])


def build_succ(inst: Instance) -> SuccTable:
    return SuccTable(succ_array(inst), inst.alphabet)


def plain_next_array(inst: Instance) -> np.ndarray:
    arr = inst._cache.get("plain")
    if arr is None:
        arr = kernels.plain_next_table(inst.codes, inst.lengths, max(inst.sigma, 1))
        inst._cache["plain"] = arr
    return arr


def build_plain_next(inst: Instance) -> PlainNextTable:
    return PlainNextTable(plain_next_array(inst), inst.alphabet)


def match_letter(inst: Instance, pL) -> str | None:
    """Letter shared by every sequence at ``pL``, or None if they differ."""
    letters = {s[p - 1] if 1 <= p <= len(s) else None for s, p in zip(inst.sequences, pL)}
    if len(letters) != 1:
        return None
    (c,) = letters
    return c


def _dominates(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def dominance_filter(children: list[StateNode]) -> list[StateNode]:
    """Drop every child whose position vector is componentwise >= another's.

    Equal vectors collapse onto the alphabetically first prefix.
    """
    order = sorted(children, key=lambda v: v.prefix)
    kept = []
    for k, b in enumerate(order):
        beaten = False
        for j, a in enumerate(order):
            if j == k or not _dominates(a.pL, b.pL):
                continue
            if a.pL != b.pL or j < k:
                beaten = True
                break
        if not beaten:
            kept.append(b)
    return kept


def expand_state(
    v: StateNode, succ: SuccTable, inst: Instance, *, dominance: bool = True
) -> list[StateNode]:
    """Children of ``v``; an empty list means ``v`` is complete."""
    table = succ.table
    children = []
    for a, letter in enumerate(inst.alphabet):
        q = []
        for i, p in enumerate(v.pL):
            nxt = int(table[i, p, a]) if p < table.shape[1] else -1
            if nxt < 0:
                break
            q.append(nxt + 1)
        else:
            children.append(StateNode(tuple(q), v.length + 1, v.prefix + letter))
    return dominance_filter(children) if dominance else children


def _roots_from(inst: Instance, plain: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Candidate root vectors, one row per (start, letter) present everywhere."""
    m = inst.m
    q = plain[np.arange(m)[None, :], starts].transpose(0, 2, 1)  # (k, sigma, m)
    ok = (q >= 0).all(axis=2)
    return q[ok].reshape(-1, m)


def initial_roots(inst: Instance, plain: PlainNextTable) -> list[StateNode]:
    starts = np.ones((1, inst.m), dtype=np.int64)
    cand = [StateNode(tuple(int(x) for x in row)) for row in _roots_from(inst, plain.table, starts)]
    kept = []
    for k, b in enumerate(cand):
        if not any(j != k and _dominates(a.pL, b.pL) for j, a in enumerate(cand)):
            kept.append(b)
    return kept


def roots_from_complete(v: StateNode, plain: PlainNextTable) -> list[StateNode]:
    table = plain.table
    if any(p >= table.shape[1] for p in v.pL):
        return []
    starts = np.array([v.pL], dtype=np.int64)
    m = len(v.pL)
    q = table[np.arange(m)[None, :], starts].transpose(0, 2, 1)
    ok = (q >= 0).all(axis=2)
    return [StateNode(tuple(int(x) for x in row)) for row in q[ok].reshape(-1, m)]


def roots_from_positions(inst: Instance, positions: np.ndarray) -> np.ndarray:
    """Vectorised :func:`roots_from_complete` over many complete vectors."""
    if len(positions) == 0:
        return np.zeros((0, inst.m), dtype=np.int32)
    return _roots_from(inst, plain_next_array(inst), np.asarray(positions, dtype=np.int64))


# --------------------------------------------------------------------------
# DOT export
# --------------------------------------------------------------------------


def _label(pL, length) -> str:
    return f"(({','.join(str(p) for p in pL)}),{length})"


def rooted_subgraph_dot(
    inst: Instance,
    roots: list[StateNode] | None = None,
    max_nodes: int = 200,
    dominance: bool = True,
) -> str:
    """DOT text of the rooted subgraphs reachable from ``roots``.

    Roots are filled blue, complete states gray.  Letters that an ordinary
    LCS step would allow but a gap constraint blocks are drawn as dashed red
    edges into white, unexpanded nodes.
    """
    succ = build_succ(inst)
    plain = plain_next_array(inst)
    if roots is None:
        roots = initial_roots(inst, build_plain_next(inst))
    lines = ["digraph rooted {", '  node [shape=circle, style=filled, fillcolor="#dde6ff"];']
    ids: dict[tuple, str] = {}
    todo: deque[StateNode] = deque()

    def node_id(v: StateNode) -> tuple[str, bool]:
        key = (v.pL, v.length)
        if key in ids:
            return ids[key], False
        ids[key] = f"n{len(ids)}"
        return ids[key], True

    for r in roots:
        rid, _ = node_id(r)
        lines.append(f'  {rid} [label="{_label(r.pL, 0)}", fillcolor="blue", fontcolor="white"];')
        letter = match_letter(inst, r.pL)
        if letter is None:
            continue
        first = StateNode(tuple(p + 1 for p in r.pL), 1, letter)
        fid, new = node_id(first)
        if new:
            todo.append(first)
        lines.append(f'  {rid} -> {fid} [label="{letter}"];')

    seen_expanded = set()
    while todo and len(seen_expanded) < max_nodes:
        v = todo.popleft()
        if (v.pL, v.length) in seen_expanded:
            continue
        seen_expanded.add((v.pL, v.length))
        vid = ids[(v.pL, v.length)]
        kids = expand_state(v, succ, inst, dominance=dominance)
        fill = "gray" if not kids else "#dde6ff"
        lines.append(f'  {vid} [label="{_label(v.pL, v.length)}", fillcolor="{fill}"];')
        kid_letters = set()
        for w in kids:
            wid, new = node_id(w)
            if new:
                todo.append(w)
            kid_letters.add(w.prefix[-1])
            lines.append(f'  {vid} -> {wid} [label="{w.prefix[-1]}"];')
        for a, letter in enumerate(inst.alphabet):
            if letter in kid_letters:
                continue
            if any(p >= plain.shape[1] for p in v.pL):
                continue
            q = [int(plain[i, p, a]) for i, p in enumerate(v.pL)]
            if min(q) < 0:
                continue
            gap_ok = [int(succ.table[i, p, a]) >= 0 for i, p in enumerate(v.pL)]
            if all(gap_ok):
                continue  # pruned by dominance, not by a gap
            bid = f"b{len(lines)}"
            lines.append(
                f'  {bid} [label="{_label(tuple(x + 1 for x in q), v.length + 1)}", fillcolor="white"];'
            )
            lines.append(f'  {vid} -> {bid} [label="{letter}", style=dashed, color=red, fontcolor=red];')
    root_keys = {(r.pL, r.length) for r in roots}
    for key, vid in ids.items():
        if key not in seen_expanded and key not in root_keys:
            lines.append(f'  {vid} [label="{_label(*key)}", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"

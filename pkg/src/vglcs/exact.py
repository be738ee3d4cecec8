"""Ground truth: brute-force oracles (any m, tiny n) and the m = 2 DP family."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .core import Instance, Solution, succ_array


class CapExceeded(ValueError):
    pass


DEFAULT_CAP = 36  # m * n; admits n <= 12 at m <= 3


def _guard(inst: Instance, cap: int) -> None:
    if inst.m * inst.n > cap:
        raise CapExceeded(f"m*n = {inst.m * inst.n} exceeds the brute-force cap {cap}")


def _require_two(inst: Instance) -> None:
    if inst.m != 2:
        raise ValueError(f"the dynamic programs need exactly 2 sequences, got {inst.m}")


def brute_force_existential(inst: Instance, cap: int = DEFAULT_CAP) -> Solution:
    """Exact optimum over all gap-valid embeddings, by memoised DFS.

    A state is the tuple of last used positions (0 before the first letter).
    """
    _guard(inst, cap)
    seqs, gaps = inst.sequences, inst.gaps
    occ = [
        {a: [q for q in range(1, len(s) + 1) if s[q - 1] == a] for a in inst.alphabet}
        for s in seqs
    ]

    @lru_cache(maxsize=None)
    def best(state: tuple[int, ...]) -> tuple[int, tuple]:
        top, arg = 0, ()
        start = state[0] == 0
        for a in inst.alphabet:
            options = []
            for i, p in enumerate(state):
                cand = [q for q in occ[i][a] if q > p and (start or q - p <= gaps[i][q - 1] + 1)]
                if not cand:
                    break
                options.append(cand)
            else:
                for q in itertools.product(*options):
                    sub, rest = best(q)
                    if sub + 1 > top:
                        top, arg = sub + 1, ((a, q),) + rest
        return top, arg

    _, path = best(tuple(0 for _ in seqs))
    text = "".join(a for a, _ in path)
    emb = tuple(tuple(q[i] for _, q in path) for i in range(inst.m))
    return Solution(text, emb)


def leftmost_completion_table(inst: Instance) -> dict[tuple[int, ...], int]:
    """Longest Succ-chain continuation from every reachable position vector.

    Keys are the position vectors of all states reachable from any match
    tuple; values are the exact optimum number of further letters.  Sibling
    dominance is *not* applied here.
    """
    table, _ = _leftmost_search(inst)
    return table


def _leftmost_search(inst: Instance):
    succ = succ_array(inst)
    sigma = inst.sigma
    memo: dict[tuple[int, ...], int] = {}
    choice: dict[tuple[int, ...], tuple[int, tuple[int, ...]] | None] = {}

    def solve(root: tuple[int, ...]) -> None:
        stack = [root]
        while stack:
            v = stack[-1]
            if v in memo:
                stack.pop()
                continue
            kids = []
            for a in range(sigma):
                q = [int(succ[i, p, a]) for i, p in enumerate(v)]
                if min(q) >= 0:
                    kids.append((a, tuple(x + 1 for x in q)))
            pending = [w for _, w in kids if w not in memo]
            if pending:
                stack.extend(pending)
                continue
            top, arg = 0, None
            for a, w in kids:
                if memo[w] + 1 > top:
                    top, arg = memo[w] + 1, (a, w)
            memo[v] = top
            choice[v] = arg
            stack.pop()

    starts = []
    for a, letter in enumerate(inst.alphabet):
        occ = [[q for q in range(1, len(s) + 1) if s[q - 1] == letter] for s in inst.sequences]
        for u in itertools.product(*occ):
            w = tuple(q + 1 for q in u)
            solve(w)
            starts.append((a, u, w))
    return memo, (starts, choice)


def brute_force_leftmost(inst: Instance, cap: int = DEFAULT_CAP) -> Solution:
    """Exact optimum over the union of all rooted subgraphs (no pruning)."""
    _guard(inst, cap)
    memo, (starts, choice) = _leftmost_search(inst)
    best_len, best_start = 0, None
    for a, u, w in starts:
        if memo[w] + 1 > best_len:
            best_len, best_start = memo[w] + 1, (a, u, w)
    if best_start is None:
        return Solution.empty(inst.m)
    a, u, w = best_start
    letters, path = [inst.alphabet[a]], [u]
    while choice[w] is not None:
        b, nxt = choice[w]
        letters.append(inst.alphabet[b])
        path.append(tuple(x - 1 for x in nxt))
        w = nxt
    emb = tuple(tuple(p[i] for p in path) for i in range(inst.m))
    return Solution("".join(letters), emb)


@dataclass(frozen=True)
class MatchLattice:
    matches: tuple[tuple[int, int], ...]
    values: np.ndarray  # (n1+1, n2+1), L(i, j) at matches, 0 elsewhere


def match_lattice(inst: Instance, method: str = "basic") -> MatchLattice:
    _require_two(inst)
    val, _, _ = _tables(inst, method)
    s1, s2 = inst.sequences
    matches = tuple(
        (i, j) for i in range(1, len(s1) + 1) for j in range(1, len(s2) + 1) if s1[i - 1] == s2[j - 1]
    )
    return MatchLattice(matches, val)


def _tables(inst: Instance, method: str, debug: bool = False):
    c, g = inst.codes, inst.gap_array
    n1, n2 = (int(x) for x in inst.lengths)
    c1 = np.ascontiguousarray(c[0, : n1 + 2])
    c2 = np.ascontiguousarray(c[1, : n2 + 2])
    g1 = np.ascontiguousarray(g[0, : n1 + 2])
    g2 = np.ascontiguousarray(g[1, : n2 + 2])
    if method == "basic":
        return kernels.dp_basic_table(c1, c2, g1, g2, n1, n2)
    if method == "ismq":
        if debug:
            return kernels._dp_ismq_np(c1, c2, g1, g2, n1, n2, debug=True)
        return kernels.dp_ismq_table(c1, c2, g1, g2, n1, n2)
    raise ValueError(f"unknown DP method {method!r}")


def _trace_back(inst: Instance, val, pi, pj) -> Solution:
    if val.size == 0 or val.max() == 0:
        return Solution.empty(2)
    flat = int(np.argmax(val))
    i, j = divmod(flat, val.shape[1])
    e1, e2 = [], []
    while i > 0:
        e1.append(i)
        e2.append(j)
        i, j = int(pi[i, j]), int(pj[i, j])
    e1.reverse()
    e2.reverse()
    text = "".join(inst.sequences[0][k - 1] for k in e1)
    return Solution(text, (tuple(e1), tuple(e2)))


def dp_basic(inst: Instance) -> Solution:
    _require_two(inst)
    return _trace_back(inst, *_tables(inst, "basic"))


def dp_ismq(inst: Instance, debug: bool = False) -> Solution:
    """Same optimum as :func:`dp_basic`, window maxima via monotone stacks.

    ``debug`` runs the sequential sweep with a naive shadow check on every
    window query.
    """
    _require_two(inst)
    return _trace_back(inst, *_tables(inst, "ismq", debug))

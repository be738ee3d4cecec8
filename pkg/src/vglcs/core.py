"""Domain types, instance files, reversal and the feasibility verifier.

Positions are 1-based everywhere.  For a sequence ``s_i`` with gap function
``G_i``, two consecutive embedded positions ``a < b`` are compatible iff
``b - a <= G_i(b) + 1``; the first character of a solution is never checked.

Two readings of feasibility are supported:

``EXISTENTIAL``
    some embedding satisfies every gap constraint.
``LEFTMOST``
    some leading occurrence, followed by the deterministic earliest
    gap-feasible chain, consumes the whole string.  This is exactly what the
    rooted state graph can generate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels


class Semantics(str, Enum):
    LEFTMOST = "leftmost"
    EXISTENTIAL = "existential"


class Heuristic(str, Enum):
    UB1 = "ub1"
    UB2 = "ub2"
    HPROB = "hprob"


class InstanceFormatError(ValueError):
    """Malformed instance file; ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class HeaderError(InstanceFormatError):
    pass


class EmptySequenceError(InstanceFormatError):
    pass


class GapLengthError(InstanceFormatError):
    pass


class NegativeGapError(InstanceFormatError):
    pass


@dataclass(frozen=True)
class Instance:
    sequences: tuple[str, ...]
    gaps: tuple[tuple[int, ...], ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        seqs = tuple(self.sequences)
        gaps = tuple(tuple(int(g) for g in row) for row in self.gaps)
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "gaps", gaps)
        if not seqs:
            raise ValueError("an instance needs at least one sequence")
        if len(gaps) != len(seqs):
            raise ValueError("one gap array per sequence is required")
        for i, (s, g) in enumerate(zip(seqs, gaps), start=1):
            if not s:
                raise ValueError(f"sequence {i} is empty")
            if len(g) != len(s):
                raise ValueError(f"sequence {i}: {len(g)} gap values for {len(s)} characters")
            if min(g) < 0:
                raise ValueError(f"sequence {i}: negative gap value")
            if any(ord(c) > 255 or c.isspace() for c in s):
                raise ValueError(f"sequence {i}: characters must be single non-space bytes")

    @property
    def m(self) -> int:
        return len(self.sequences)

    @property
    def n(self) -> int:
        return max(len(s) for s in self.sequences)

    @cached_property
    def alphabet(self) -> str:
        return "".join(sorted(set("".join(self.sequences))))

    @property
    def sigma(self) -> int:
        return len(self.alphabet)

    @cached_property
    def letter_index(self) -> dict[str, int]:
        return {c: k for k, c in enumerate(self.alphabet)}

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([len(s) for s in self.sequences], dtype=np.int64)

    @cached_property
    def codes(self) -> np.ndarray:
        out = np.full((self.m, self.n + 2), -1, dtype=np.int32)
        idx = self.letter_index
        for i, s in enumerate(self.sequences):
            out[i, 1 : len(s) + 1] = [idx[c] for c in s]
        return out

    @cached_property
    def gap_array(self) -> np.ndarray:
        out = np.zeros((self.m, self.n + 2), dtype=np.int64)
        for i, g in enumerate(self.gaps):
            out[i, 1 : len(g) + 1] = g
        return out

    def encode(self, text: str) -> np.ndarray:
        """Letter codes of ``text``; characters outside the alphabet map to -2."""
        idx = self.letter_index
        return np.array([idx.get(c, -2) for c in text], dtype=np.int32)


@dataclass(frozen=True)
class StateNode:
    pL: tuple[int, ...]
    length: int = 0
    prefix: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pL", tuple(int(p) for p in self.pL))


@dataclass(frozen=True)
class Solution:
    text: str
    embeddings: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.text)

    @classmethod
    def empty(cls, m: int) -> "Solution":
        return cls("", tuple(() for _ in range(m)))


@dataclass(frozen=True)
class VerifyReport:
    """``per_sequence[i]`` is a witness tuple, or the 1-based index of the
    first character of the text that has no reachable position in ``s_i``."""

    feasible: bool
    per_sequence: tuple[tuple[int, ...] | int, ...]

    @property
    def embeddings(self) -> tuple[tuple[int, ...], ...]:
        if not self.feasible:
            raise ValueError("infeasible text has no embeddings")
        return self.per_sequence  # type: ignore[return-value]


@dataclass(frozen=True)
class SolverConfig:
    beta: int = 500
    beta_bwd: int = 100
    sources_from_r: int = 10
    beam_iters: int = 100
    heuristic: Heuristic = Heuristic.UB2
    heuristic_prime: Heuristic = Heuristic.UB2
    time_limit_s: float = 1800.0
    semantics: Semantics = Semantics.LEFTMOST
    seed: int = 0
    backward: bool = True
    sibling_dominance: bool = True
    beam_dominance: bool = False
    hprob_k_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "heuristic", Heuristic(self.heuristic))
        object.__setattr__(self, "heuristic_prime", Heuristic(self.heuristic_prime))
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        for name in ("beta", "beta_bwd", "sources_from_r"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.beam_iters < 0:
            raise ValueError("beam_iters must be non-negative")
        if not self.time_limit_s > 0:
            raise ValueError("time_limit_s must be positive")
        if not self.hprob_k_scale > 0:
            raise ValueError("hprob_k_scale must be positive")

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = v.value if isinstance(v, Enum) else v
        return out


# --------------------------------------------------------------------------
# Instance files
# --------------------------------------------------------------------------


def parse_instance(text: str) -> Instance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln.rstrip("\r") for ln in lines]
    if not lines:
        raise HeaderError(1, "empty file, expected the number of sequences")
    try:
        m = int(lines[0].strip())
    except ValueError:
        raise HeaderError(1, f"expected the number of sequences, got {lines[0]!r}") from None
    if m < 1:
        raise HeaderError(1, "the number of sequences must be at least 1")
    if len(lines) != 1 + 2 * m:
        raise HeaderError(1, f"header announces {m} sequences ({1 + 2 * m} lines), file has {len(lines)}")
    seqs, gaps = [], []
    for i in range(m):
        s_line, g_line = 2 + 2 * i, 3 + 2 * i
        s = lines[s_line - 1].strip()
        if not s:
            raise EmptySequenceError(s_line, f"sequence {i + 1} is empty")
        if any(c.isspace() for c in s):
            raise InstanceFormatError(s_line, "sequences must not contain whitespace")
        try:
            g = [int(tok) for tok in lines[g_line - 1].split()]
        except ValueError:
            raise InstanceFormatError(g_line, "gap values must be decimal integers") from None
        if len(g) != len(s):
            raise GapLengthError(g_line, f"{len(g)} gap values for a sequence of length {len(s)}")
        if any(v < 0 for v in g):
            raise NegativeGapError(g_line, "gap values must be non-negative")
        seqs.append(s)
        gaps.append(g)
    return Instance(tuple(seqs), tuple(tuple(g) for g in gaps))


def write_instance(inst: Instance) -> str:
    out = [str(inst.m)]
    for s, g in zip(inst.sequences, inst.gaps):
        out.append(s)
        out.append(" ".join(str(v) for v in g))
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="latin-1", newline="") as fh:
        return parse_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="latin-1", newline="\n") as fh:
        fh.write(write_instance(inst))


def reverse_instance(inst: Instance) -> Instance:
    cached = inst._cache.get("reversed")
    if cached is None:
        cached = Instance(
            tuple(s[::-1] for s in inst.sequences),
            tuple(tuple(reversed(g)) for g in inst.gaps),
        )
        cached._cache["reversed"] = inst
        inst._cache["reversed"] = cached
    return cached


def succ_array(inst: Instance) -> np.ndarray:
    """Dense (m, n+2, sigma) gap-aware successor array, cached per instance."""
    arr = inst._cache.get("succ")
    if arr is None:
        arr = kernels.succ_table(inst.codes, inst.gap_array, inst.lengths, max(inst.sigma, 1))
        inst._cache["succ"] = arr
    return arr


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------


def _leftmost_one(codes_i, succ_i, n_i, t):
    """Deterministic chains from every leading occurrence of ``t[0]``.

    Returns (witness or None, number of characters consumed by the best lead).
    """
    leads = np.nonzero(codes_i[1 : n_i + 1] == t[0])[0] + 1
    if len(leads) == 0:
        return None, 0
    path = np.empty((len(t), len(leads)), dtype=np.int64)
    path[0] = leads
    alive = np.ones(len(leads), dtype=bool)
    depth = np.ones(len(leads), dtype=np.int64)
    cur = leads.copy()
    for x in range(1, len(t)):
        if t[x] < 0:
            break
        nxt = np.where(alive, succ_i[np.minimum(cur + 1, n_i + 1), t[x]], -1)
        alive &= nxt >= 0
        if not alive.any():
            break
        depth[alive] += 1
        cur = np.where(alive, nxt, cur)
        path[x] = cur
    full = np.nonzero(depth == len(t))[0]
    if len(full) == 0:
        return None, int(depth.max())
    k = full[0]
    return tuple(int(p) for p in path[:, k]), len(t)


def _existential_one(codes_i, gaps_i, n_i, t):
    """Reachable-set recurrence; witness by smallest-position back-pointers."""
    gmax = int(gaps_i[1 : n_i + 1].max())
    seq = codes_i[: n_i + 1]
    g = gaps_i[: n_i + 1]
    reach = [(seq == t[0]) & (np.arange(n_i + 1) >= 1)]
    if not reach[0].any():
        return None, 1
    for x in range(1, len(t)):
        prev = reach[-1]
        cur = np.zeros(n_i + 1, dtype=bool)
        for d in range(1, gmax + 2):
            shifted = np.zeros(n_i + 1, dtype=bool)
            shifted[d:] = prev[:-d]
            cur |= shifted & (d <= g + 1)
        cur &= seq == t[x]
        if not cur.any():
            return None, x + 1
        reach.append(cur)
    q = int(np.argmax(reach[-1]))
    emb = [q]
    for x in range(len(t) - 2, -1, -1):
        cand = np.nonzero(reach[x])[0]
        cand = cand[(cand < q) & (q - cand <= g[q] + 1)]
        q = int(cand[0])
        emb.append(q)
    return tuple(reversed(emb)), len(t)


def verify_solution(inst: Instance, text: str, semantics: Semantics = Semantics.LEFTMOST) -> VerifyReport:
    semantics = Semantics(semantics)
    if not text:
        return VerifyReport(True, tuple(() for _ in range(inst.m)))
    t = inst.encode(text)
    codes, lens = inst.codes, inst.lengths
    per = []
    if semantics is Semantics.LEFTMOST:
        succ = succ_array(inst)
        for i in range(inst.m):
            if t[0] < 0:
                per.append(1)
                continue
            emb, depth = _leftmost_one(codes[i], succ[i], int(lens[i]), t)
            per.append(emb if emb is not None else depth + 1)
    else:
        for i in range(inst.m):
            if t[0] < 0:
                per.append(1)
                continue
            emb, bad = _existential_one(codes[i], inst.gap_array[i], int(lens[i]), t)
            per.append(emb if emb is not None else bad)
    feasible = all(isinstance(e, tuple) for e in per)
    return VerifyReport(feasible, tuple(per))


def anchored_suffix_start(
    inst: Instance, text: str, anchor: Sequence[int], semantics: Semantics = Semantics.LEFTMOST
) -> int:
    """Smallest ``k`` such that ``text[k:]`` can end exactly at ``anchor``.

    ``anchor[i]`` must hold the last character of ``text`` in every sequence.
    Under LEFTMOST the chain from some leading occurrence must land on the
    anchor; under EXISTENTIAL any gap-valid embedding ending there suffices.
    Feasibility is monotone in ``k`` so the scan stops at the first failure.
    Returns ``len(text) - 1`` when only the anchored letter itself survives.
    """
    semantics = Semantics(semantics)
    t = inst.encode(text)
    last = len(t) - 1
    if last <= 0:
        return 0
    codes, lens, gaps = inst.codes, inst.lengths, inst.gap_array
    succ = succ_array(inst) if semantics is Semantics.LEFTMOST else None
    sets = []
    for i in range(inst.m):
        n_i = int(lens[i])
        cur = np.zeros(n_i + 2, dtype=bool)
        cur[anchor[i]] = True
        sets.append(cur)
    idx_cache = [np.arange(int(lens[i]) + 2) for i in range(inst.m)]
    k = last
    while k > 0:
        a = t[k - 1]
        if a < 0:
            break
        nxt_sets = []
        for i in range(inst.m):
            n_i = int(lens[i])
            seq_hit = codes[i, : n_i + 2] == a
            if succ is not None:
                jump = succ[i, np.minimum(idx_cache[i] + 1, n_i + 1), t[k]]
                ok = (jump >= 0) & sets[i][np.maximum(jump, 0)]
            else:
                ok = np.zeros(n_i + 2, dtype=bool)
                g = gaps[i, : n_i + 2]
                targets = np.nonzero(sets[i])[0]
                for p in targets:
                    lo = max(1, p - int(g[p]) - 1)
                    ok[lo:p] = True
            nxt = seq_hit & ok
            nxt[0] = False
            if not nxt.any():
                return k
            nxt_sets.append(nxt)
        sets = nxt_sets
        k -= 1
    return k

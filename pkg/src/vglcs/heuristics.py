"""Guidance functions for ranking beam nodes and candidate roots.

All three ignore the gap constraints, so UB1 and UB2 are upper bounds on the
length any gap-feasible completion can reach.  Array versions take a block of
position vectors ``pos`` (rows, m) and lengths and return float scores where
larger is better; for HPROB the score is a log-probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Heuristic, Instance, StateNode


@dataclass(frozen=True)
class ProbMatrix:
    """P[k, r]: probability that a uniform random string of length k is a
    subsequence of a uniform random string of length r over ``sigma`` letters."""

    sigma: int
    log_p: np.ndarray  # (K+1, n+1), -inf where the probability is 0

    @property
    def p(self) -> np.ndarray:
        return np.exp(self.log_p)

    def __call__(self, k: int, r: int) -> float:
        if k > r:
            return 0.0
        return float(np.exp(self.log_p[k, r]))


@lru_cache(maxsize=64)
def build_prob_matrix(sigma_size: int, n: int, K: int | None = None) -> ProbMatrix:
    if sigma_size < 1:
        raise ValueError("sigma_size must be at least 1")
    K = n if K is None else K
    log_hit = -math.log(sigma_size)
    log_miss = math.log1p(-1.0 / sigma_size) if sigma_size > 1 else -math.inf
    lp = np.full((K + 1, n + 1), -np.inf)
    lp[0, :] = 0.0
    ks = np.arange(1, K + 1)
    for r in range(1, n + 1):
        col = np.logaddexp(log_hit + lp[ks - 1, r - 1], log_miss + lp[ks, r - 1])
        col[ks > r] = -np.inf
        lp[1:, r] = col
    lp.setflags(write=False)
    return ProbMatrix(sigma_size, lp)


def suffix_counts(inst: Instance) -> np.ndarray:
    """cnt[i, j, a] = occurrences of letter a in s_i[j, |s_i|] (0 past the end)."""
    cnt = inst._cache.get("suffix_counts")
    if cnt is None:
        sigma = max(inst.sigma, 1)
        onehot = (inst.codes[:, :, None] == np.arange(sigma)[None, None, :]).astype(np.int32)
        cnt = np.cumsum(onehot[:, ::-1, :], axis=1)[:, ::-1, :].astype(np.int32)
        inst._cache["suffix_counts"] = cnt
    return cnt


def _remaining(inst: Instance, pos: np.ndarray) -> np.ndarray:
    return np.maximum(inst.lengths[None, :] - pos + 1, 0)


def ub1_array(inst: Instance, pos: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    return lengths + _remaining(inst, pos).min(axis=1)


def ub2_array(inst: Instance, pos: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    cnt = suffix_counts(inst)
    per = cnt[np.arange(inst.m)[None, :], pos]  # (rows, m, sigma)
    return lengths + per.min(axis=1).sum(axis=1)


def hprob_array(
    inst: Instance, pos: np.ndarray, lengths: np.ndarray, k_scale: float = 1.0
) -> np.ndarray:
    sigma = max(inst.sigma, 1)
    pm = build_prob_matrix(sigma, inst.n)
    r = _remaining(inst, pos)
    k = np.ceil(k_scale * r.min(axis=1) / sigma).astype(np.int64)
    k = np.minimum(k, pm.log_p.shape[0] - 1)
    logs = pm.log_p[k[:, None], r]
    out = logs[:, 0].copy()
    for i in range(1, inst.m):
        out += logs[:, i]
    return out


def score(
    kind: Heuristic,
    inst: Instance,
    pos: np.ndarray,
    lengths: np.ndarray,
    k_scale: float = 1.0,
) -> np.ndarray:
    kind = Heuristic(kind)
    pos = np.asarray(pos, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    if kind is Heuristic.UB1:
        return ub1_array(inst, pos, lengths).astype(np.float64)
    if kind is Heuristic.UB2:
        return ub2_array(inst, pos, lengths).astype(np.float64)
    return hprob_array(inst, pos, lengths, k_scale)


def ub1(v: StateNode, inst: Instance) -> int:
    return int(ub1_array(inst, np.array([v.pL]), np.array([v.length]))[0])


def ub2(v: StateNode, inst: Instance) -> int:
    return int(ub2_array(inst, np.array([v.pL]), np.array([v.length]))[0])


def h_prob(v: StateNode, inst: Instance, pm: ProbMatrix | None = None, k_scale: float = 1.0) -> float:
    """Probability-style score of ``v`` (product over sequences, via logs)."""
    if pm is None:
        pm = build_prob_matrix(max(inst.sigma, 1), inst.n)
    sigma = pm.sigma
    r = [max(n_i - p + 1, 0) for n_i, p in zip(inst.lengths.tolist(), v.pL)]
    k = min(math.ceil(k_scale * min(r) / sigma), pm.log_p.shape[0] - 1)
    total = 0.0
    for ri in r:
        total += float(pm.log_p[k, ri])
    return math.exp(total)

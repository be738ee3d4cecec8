"""Integer-programming model for two sequences, its LP text form, and a tiny
exact evaluator used to cross-check it against the DP.

Variables come in pairs per match (i, j): ``x_i_j`` selects the match and
``s_i_j`` marks it as the start of the subsequence.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .core import Instance


@dataclass(frozen=True)
class Constraint:
    name: str
    kind: str  # activation | start | conflict | region
    terms: tuple[tuple[int, int], ...]  # (variable index, coefficient)
    rhs: int  # every row is  sum(terms) <= rhs


@dataclass(frozen=True)
class IlpModel:
    matches: tuple[tuple[int, int], ...]
    constraints: tuple[Constraint, ...]
    var_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        names = [f"x_{i}_{j}" for i, j in self.matches] + [f"s_{i}_{j}" for i, j in self.matches]
        object.__setattr__(self, "var_names", tuple(names))

    @property
    def n_vars(self) -> int:
        return 2 * len(self.matches)

    def x(self, k: int) -> int:
        return k

    def s(self, k: int) -> int:
        return len(self.matches) + k

    def count(self, kind: str) -> int:
        return sum(1 for c in self.constraints if c.kind == kind)


def build_ilp_model(inst: Instance) -> IlpModel:
    if inst.m != 2:
        raise ValueError(f"the ILP model needs exactly 2 sequences, got {inst.m}")
    s1, s2 = inst.sequences
    g1, g2 = inst.gaps
    matches = tuple(
        (i, j) for i in range(1, len(s1) + 1) for j in range(1, len(s2) + 1) if s1[i - 1] == s2[j - 1]
    )
    M = len(matches)
    X = lambda k: k  # noqa: E731
    S = lambda k: M + k  # noqa: E731
    rows: list[Constraint] = []

    for k, (i, j) in enumerate(matches):
        terms = [(X(k), 1)]
        for kp, (ip, jp) in enumerate(matches):
            if ip < i and jp < j and i - ip <= g1[i - 1] + 1 and j - jp <= g2[j - 1] + 1:
                terms.append((X(kp), -1))
        terms.append((S(k), -1))
        rows.append(Constraint(f"act_{i}_{j}", "activation", tuple(terms), 0))

    rows.append(Constraint("start", "start", tuple((S(k), 1) for k in range(M)), 1))

    for k, (i, j) in enumerate(matches):
        for kp in range(k + 1, M):
            ip, jp = matches[kp]
            if (i <= ip and j >= jp) or (i >= ip and j <= jp):
                rows.append(Constraint(f"conf_{i}_{j}_{ip}_{jp}", "conflict", ((X(k), 1), (X(kp), 1)), 1))

    # s_ij = 1 forbids any selected match strictly below-left of (i, j).
    # Written with a big-M weight so that, when s_ij = 0, the row is slack.
    for k, (i, j) in enumerate(matches):
        below = [kp for kp, (ip, jp) in enumerate(matches) if ip <= i - 1 and jp <= j - 1]
        big = max(len(below), 1)
        terms = tuple((X(kp), 1) for kp in below) + ((S(k), big),)
        rows.append(Constraint(f"region_{i}_{j}", "region", terms, big))

    return IlpModel(matches, tuple(rows))


def _expr(model: IlpModel, terms) -> list[str]:
    out = []
    for n, (v, c) in enumerate(terms):
        name = model.var_names[v]
        sign = "-" if c < 0 else ("+" if n else "")
        mag = abs(c)
        body = name if mag == 1 else f"{mag} {name}"
        out.append(f"{sign} {body}" if sign else body)
    return out


def _wrap(head: str, parts: list[str], tail: str = "", width: int = 78) -> list[str]:
    lines, cur = [], head
    for p in parts:
        if len(cur) + 1 + len(p) > width and cur.strip():
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur else p
    if tail:
        cur = f"{cur} {tail}"
    lines.append(cur)
    return lines


def write_lp_text(model: IlpModel) -> str:
    """CPLEX LP text: objective, constraints and binaries, in a fixed order."""
    M = len(model.matches)
    out = [f"\\ VGLCS model: {M} matches, {model.n_vars} binaries, {len(model.constraints)} rows", "Maximize"]
    if M:
        out += _wrap(" obj:", _expr(model, [(k, 1) for k in range(M)]))
    else:
        out.append(" obj: 0")
    out.append("Subject To")
    for row in model.constraints:
        if not row.terms:
            out.append(f"\\ {row.name}: empty row, 0 <= {row.rhs}")
            continue
        out += _wrap(f" {row.name}:", _expr(model, row.terms), f"<= {row.rhs}")
    out.append("Binaries")
    if model.var_names:
        out += _wrap("", list(model.var_names))
    out.append("End")
    return "\n".join(out) + "\n"


def brute_force_ilp(model: IlpModel, cap: int = 30) -> int:
    """Exact optimum of ``model`` by depth-first enumeration of 0-1 assignments.

    Partial assignments are cut as soon as some row's smallest reachable
    activity exceeds its right-hand side, or when the objective cannot beat
    the incumbent.  Start variables are fixed first, then selections in
    (i, j) order, so every activation row is decided once its match is.
    """
    if model.n_vars > cap:
        raise ValueError(f"{model.n_vars} binaries exceed the cap {cap}")
    M = len(model.matches)
    if M == 0:
        return 0
    order = [model.s(k) for k in range(M)] + [model.x(k) for k in range(M)]
    rows_of: list[list[tuple[int, int]]] = [[] for _ in range(model.n_vars)]
    minact = [0] * len(model.constraints)
    rhs = [c.rhs for c in model.constraints]
    for r, c in enumerate(model.constraints):
        for v, coef in c.terms:
            rows_of[v].append((r, coef))
            if coef < 0:
                minact[r] += coef
    if any(minact[r] > rhs[r] for r in range(len(rhs))):
        return 0  # infeasible even at the loosest point; cannot happen for built models
    best = 0

    def assign(v: int, val: int) -> bool:
        ok = True
        for r, coef in rows_of[v]:
            if val and coef > 0:
                minact[r] += coef
            elif not val and coef < 0:
                minact[r] -= coef
            if minact[r] > rhs[r]:
                ok = False
        return ok

    def undo(v: int, val: int) -> None:
        for r, coef in rows_of[v]:
            if val and coef > 0:
                minact[r] -= coef
            elif not val and coef < 0:
                minact[r] += coef

    def dfs(depth: int, gained: int) -> None:
        nonlocal best
        if depth == len(order):
            best = max(best, gained)
            return
        x_left = min(M, len(order) - depth)
        if gained + x_left <= best:
            return
        v = order[depth]
        is_x = v < M
        for val in (1, 0):
            if assign(v, val):
                dfs(depth + 1, gained + (val if is_x else 0))
            undo(v, val)

    limit = sys.getrecursionlimit()
    if limit < len(order) + 100:
        sys.setrecursionlimit(len(order) + 100)
    dfs(0, 0)
    return best

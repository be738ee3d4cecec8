"""End-to-end acceptance checks, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal, bypassing output capture.
"""

import os
import random
import subprocess
import sys
from dataclasses import replace
from statistics import mean

import numpy as np
import pytest
from conftest import const_instance

from vglcs import Instance, Semantics, StateNode, verify_solution
from vglcs.exact import (
    brute_force_existential,
    brute_force_leftmost,
    dp_basic,
    dp_ismq,
    leftmost_completion_table,
)
from vglcs.genbench import GenSpec, generate_group, solution_semantics, solve_named
from vglcs.heuristics import build_prob_matrix, ub1, ub2
from vglcs.ilp import brute_force_ilp, build_ilp_model
from vglcs.imsbs import bs_baseline, imsbs_solve, preset

# every (instance, text, semantics) any solver returned, checked by criterion 5
RETURNED: list[tuple[Instance, str, Semantics]] = []


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        return ok

    return emit


def record(inst, sol, sem):
    RETURNED.append((inst, sol.text, Semantics(sem)))
    return sol


def oracle_suite(count=200, seed=2024):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        seqs, gaps = [], []
        for _ in range(2):
            n = rng.randint(1, 10)
            seqs.append("".join(rng.choice("AB") for _ in range(n)))
            gaps.append(tuple(rng.randint(0, 3) for _ in range(n)))
        out.append(Instance(tuple(seqs), tuple(gaps)))
    return out


def test_criterion_1_worked_examples(report):
    fig1 = const_instance(["ABCA", "ACAB"])
    fig2 = const_instance(["ATGGAAA", "ATCCAAA"])
    checks = {}
    sol, _ = imsbs_solve(fig1)
    checks["fig1 imsbs = ACA"] = record(fig1, sol, "leftmost").text == "ACA"
    checks["fig1 brute existential = 3"] = len(record(fig1, brute_force_existential(fig1), "existential")) == 3
    checks["fig1 brute leftmost = 3"] = len(record(fig1, brute_force_leftmost(fig1), "leftmost")) == 3
    checks["verify AB infeasible under leftmost"] = not verify_solution(fig1, "AB", Semantics.LEFTMOST).feasible
    checks["verify AB feasible under existential"] = verify_solution(fig1, "AB", Semantics.EXISTENTIAL).feasible
    sol, _ = bs_baseline(fig2)
    checks["fig2 bs = AT"] = record(fig2, sol, "leftmost").text == "AT"
    sol, _ = imsbs_solve(fig2)
    checks["fig2 imsbs = AAA"] = record(fig2, sol, "leftmost").text == "AAA"
    failed = [k for k, v in checks.items() if not v]
    detail = "all sub-checks hold" if not failed else "failed sub-checks: " + "; ".join(failed)
    assert report(1, not failed, f"{len(checks) - len(failed)}/{len(checks)} sub-checks; {detail}"), failed


def test_criterion_2_oracle_agreement(report):
    bad = []
    for k, inst in enumerate(oracle_suite()):
        ex = record(inst, brute_force_existential(inst), "existential")
        a = record(inst, dp_basic(inst), "existential")
        b = record(inst, dp_ismq(inst), "existential")
        lm = record(inst, brute_force_leftmost(inst), "leftmost")
        if not (len(a) == len(b) == len(ex) and len(lm) <= len(ex)):
            bad.append(k)
    assert report(2, not bad, f"200 instances, {len(bad)} disagreements"), bad


def test_criterion_3_ilp_soundness(report):
    rng = random.Random(77)
    bad, errors = 0, 0
    for _ in range(50):
        seqs, gaps = [], []
        for _ in range(2):
            n = rng.randint(1, 8)
            seqs.append("".join(rng.choice("AB") for _ in range(n)))
            gaps.append(tuple(rng.randint(0, 3) for _ in range(n)))
        inst = Instance(tuple(seqs), tuple(gaps))
        try:
            # n <= 8 gives up to 64 matches; the default cap of 30 binaries is too small
            val = brute_force_ilp(build_ilp_model(inst), cap=2 * 64)
        except Exception:
            errors += 1
            continue
        bad += val != len(record(inst, dp_basic(inst), "existential"))
    ok = bad == 0 and errors == 0
    assert report(3, ok, f"50 instances, {bad} mismatches, {errors} exceptions")


def test_criterion_4_heuristic_validity(report):
    violations, nodes = 0, 0
    for inst in oracle_suite():
        for pL, best in leftmost_completion_table(inst).items():
            v = StateNode(pL)
            nodes += 1
            violations += ub1(v, inst) < best or ub2(v, inst) < best
    boundary_ok = True
    for sigma in (1, 2, 4, 26):
        p = build_prob_matrix(sigma, 50).p
        boundary_ok &= bool(np.all(p[0] == 1.0))
        boundary_ok &= all(np.all(p[k, :k] == 0.0) for k in range(1, 51))
    ok = violations == 0 and boundary_ok
    assert report(4, ok, f"{nodes} nodes, {violations} bound violations, boundary identities {'exact' if boundary_ok else 'broken'}")


REFERENCE_DP = {
    (50, 2): 38.1,
    (50, 4): 30.3,
    (100, 2): 77.4,
    (100, 4): 62.3,
    (200, 2): 156.4,
    (200, 4): 127.2,
    (500, 2): 395.9,
    (500, 4): 317.2,
}


@pytest.mark.slow
def test_criterion_6_dp_optima(report):
    lines, ok = [], True
    for (n, sigma), ref in REFERENCE_DP.items():
        vals = []
        for _, inst in generate_group(GenSpec(2, n, sigma)):
            vals.append(len(record(inst, dp_ismq(inst), "existential")))
        dev = (mean(vals) - ref) / ref
        ok &= abs(dev) <= 0.15
        lines.append(f"n={n} s={sigma}: {mean(vals):.1f} vs {ref} ({dev:+.1%})")
    assert report(6, ok, "; ".join(lines))


@pytest.mark.slow
def test_criterion_7_method_ordering(report):
    parts, ok = [], True
    for n in (100, 200):
        bs, ims = [], []
        for _, inst in generate_group(GenSpec(3, n, 2)):
            bs.append(len(record(inst, solve_named("BS", inst)[0], "leftmost")))
            ims.append(len(record(inst, solve_named("IMSBS", inst)[0], "leftmost")))
        ratio = mean(ims) / max(mean(bs), 1e-9)
        ok &= ratio >= 1.5
        parts.append(f"m=3 n={n}: IMSBS {mean(ims):.1f} vs BS {mean(bs):.1f} (x{ratio:.2f})")
    bs, gr = [], []
    greedy = preset("IMSBS_GREEDY", time_limit_s=60)
    for _, inst in generate_group(GenSpec(10, 50, 2)):
        bs.append(len(record(inst, solve_named("BS", inst)[0], "leftmost")))
        gr.append(len(record(inst, solve_named("IMSBS_GREEDY", inst, greedy)[0], "leftmost")))
    ok &= mean(gr) >= mean(bs)
    parts.append(f"m=10 n=50: IMSBS_GREEDY {mean(gr):.1f} vs BS {mean(bs):.1f}")
    assert report(7, ok, "; ".join(parts))


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "vglcs", *argv], capture_output=True, text=True, env=dict(os.environ))


def test_criterion_8_determinism(report, tmp_path):
    paths = []
    for idx, inst in generate_group(GenSpec(3, 60, 2, count=2, seed=3)):
        p = tmp_path / f"{idx}.vglcs"
        p.write_text(f"{inst.m}\n" + "".join(f"{s}\n{' '.join(map(str, g))}\n" for s, g in zip(inst.sequences, inst.gaps)))
        paths.append(str(p))
    runs = [
        _cli("solve", paths[0], "--algo", "imsbs"),
        _cli("solve", paths[0], "--algo", "imsbs"),
        _cli("solve", paths[0], "--algo", "imsbs", "--jobs", "2"),
    ]
    multi = [_cli("solve", *paths, "--algo", "imsbs", "--jobs", j) for j in ("1", "2")]
    codes_ok = all(r.returncode == 0 for r in runs + multi)
    single = len({r.stdout for r in runs}) == 1
    many = multi[0].stdout == multi[1].stdout
    ok = codes_ok and single and many and bool(runs[0].stdout)
    assert report(8, ok, f"single file identical x3: {single}; two files, --jobs 1 vs 2 identical: {many}")


def test_criterion_5_feasibility(report):
    # runs last in this file so it sees every solution the other criteria produced
    rng = random.Random(5)
    for _ in range(30):
        seqs = tuple("".join(rng.choice("ACG") for _ in range(rng.randint(5, 30))) for _ in range(3))
        inst = Instance(seqs, tuple(tuple(rng.randint(0, 3) for _ in s) for s in seqs))
        for name in ("BS", "IMSBS", "IMSBS_GREEDY"):
            cfg = preset(name, beta=min(preset(name).beta, 50), beam_iters=min(preset(name).beam_iters, 20))
            for sem in Semantics:
                cfg_s = replace(cfg, semantics=sem)
                record(inst, solve_named(name, inst, cfg_s)[0], solution_semantics(name, cfg_s))
    bad = [(i.sequences, t, s.value) for i, t, s in RETURNED if not verify_solution(i, t, s).feasible]
    assert report(5, not bad, f"{len(RETURNED)} returned solutions checked, {len(bad)} violations"), bad[:5]

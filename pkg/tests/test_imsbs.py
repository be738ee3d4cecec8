import json
import random
from dataclasses import replace

import numpy as np
import pytest
from conftest import check_embedding, const_instance, random_instance

from vglcs import Heuristic, Semantics, SolverConfig, StateNode, verify_solution
from vglcs.exact import brute_force_leftmost, dp_basic
from vglcs.imsbs import RootPool, RunTrace, bs_baseline, imsbs_solve, preset


def test_presets():
    bs = preset("BS")
    assert (bs.beta, bs.heuristic, bs.beam_iters, bs.backward) == (10_000, Heuristic.HPROB, 1, False)
    assert preset("imsbs") == SolverConfig()
    g = preset("IMSBS-GREEDY")
    assert (g.beta, g.beam_iters) == (1, 10_000)
    assert preset("IMSBS", beta=7).beta == 7
    with pytest.raises(ValueError):
        preset("nope")


def test_fig2_trace(fig2):
    sol, trace = imsbs_solve(fig2)
    assert sol.text == "AAA" and sol.embeddings == ((5, 6, 7), (5, 6, 7))
    recs = trace.records
    assert [r["roots"] for r in recs] == [[[1, 1]], [[5, 5]]]
    assert [r["forward_best"] for r in recs] == [2, 3]
    assert [r["incumbent"] for r in recs] == [2, 3]
    assert recs[0]["new_roots"] == 1


def test_bs_stops_after_first_pass(fig2):
    sol, trace = bs_baseline(fig2)
    assert sol.text == "AT" and len(trace.records) == 1


def test_zero_iterations_is_empty(fig2):
    sol, trace = imsbs_solve(fig2, SolverConfig(beam_iters=0))
    assert sol.text == "" and sol.embeddings == ((), ()) and trace.records == []


def test_disjoint_alphabets():
    sol, trace = imsbs_solve(const_instance(["AAAA", "BBBB"]))
    assert sol.text == "" and trace.records == []


def test_root_pool_order_and_seen_set(fig1):
    pool = RootPool(fig1, Heuristic.UB2)
    assert pool.push_many(np.array([[4, 3], [1, 1], [2, 2]])) == 3
    assert pool.push_many(np.array([[1, 1], [2, 2]])) == 0
    assert not pool.push(StateNode((4, 3)))
    assert [w.pL for w in pool.pop_many(5)] == [(1, 1), (2, 2), (4, 3)]
    assert len(pool) == 0
    # popped roots stay seen
    assert not pool.push(StateNode((1, 1)))


def test_incumbent_monotone_and_jsonl(tmp_path):
    rng = random.Random(3)
    inst = random_instance(rng, m=3, n_max=40, n_min=40, alphabet="ACGT", g_max=4)
    cfg = SolverConfig(beta=5, beta_bwd=5, sources_from_r=2, beam_iters=15)
    sol, trace = imsbs_solve(inst, cfg)
    inc = [r["incumbent"] for r in trace.records]
    assert inc == sorted(inc) and inc[-1] == len(sol)
    assert [r["iteration"] for r in trace.records] == list(range(len(inc)))
    path = tmp_path / "t.jsonl"
    trace.write(path)
    lines = path.read_text().splitlines()
    assert [json.loads(ln) for ln in lines] == trace.records


def test_trace_round_trip_empty():
    assert RunTrace().to_jsonl() == ""


def test_time_limit_respected():
    rng = random.Random(4)
    inst = random_instance(rng, m=3, n_max=60, n_min=60, alphabet="AB", g_max=3)
    sol, trace = imsbs_solve(inst, SolverConfig(time_limit_s=1e-9))
    assert len(trace.records) <= 1
    assert verify_solution(inst, sol.text).feasible


def test_below_exact_optimum():
    rng = random.Random(5)
    cfg = SolverConfig(beta=1000, beam_iters=50)
    for _ in range(40):
        inst = random_instance(rng, m=2, n_max=10, n_min=4, alphabet="AB", g_max=2)
        sol, _ = imsbs_solve(inst, cfg)
        assert len(sol) <= len(dp_basic(inst))
        assert len(sol) <= len(brute_force_leftmost(inst))
        assert verify_solution(inst, sol.text, Semantics.LEFTMOST).feasible


def test_more_iterations_never_hurt():
    # iteration 0 with every initial root and no refinement is the one-pass
    # baseline; later iterations only replace the incumbent by longer ones
    rng = random.Random(6)
    for _ in range(10):
        inst = random_instance(rng, m=3, n_max=30, n_min=20, alphabet="ACG", g_max=3)
        base_cfg = preset("BS", beta=20)
        base, _ = bs_baseline(inst, base_cfg)
        more, _ = imsbs_solve(inst, replace(base_cfg, beam_iters=10, sources_from_r=1000))
        assert len(more) >= len(base)


@pytest.mark.parametrize("sem", list(Semantics))
def test_result_feasible_under_configured_semantics(sem):
    rng = random.Random(7)
    for _ in range(10):
        inst = random_instance(rng, m=2, n_max=25, n_min=10, alphabet="AB", g_max=2)
        sol, _ = imsbs_solve(inst, SolverConfig(beta=10, beta_bwd=10, beam_iters=10, semantics=sem))
        assert verify_solution(inst, sol.text, sem).feasible
        check_embedding(inst, sol.text, sol.embeddings)


def test_deterministic_output():
    rng = random.Random(8)
    inst = random_instance(rng, m=3, n_max=50, n_min=50, alphabet="AB", g_max=3)
    cfg = SolverConfig(beta=20, beta_bwd=10, beam_iters=10)
    runs = [imsbs_solve(inst, cfg) for _ in range(2)]
    assert runs[0][0] == runs[1][0]
    strip = [[{k: v for k, v in r.items() if k != "elapsed_s"} for r in t.records] for _, t in runs]
    assert strip[0] == strip[1]

import itertools
import random

import pytest
from conftest import const_instance, random_instance

from vglcs import Instance
from vglcs.exact import dp_basic
from vglcs.ilp import Constraint, IlpModel, brute_force_ilp, build_ilp_model, write_lp_text


def conflicting(a, b):
    (i, j), (ip, jp) = a, b
    return (i <= ip and j >= jp) or (i >= ip and j <= jp)


def feasible_assignments(model):
    for bits in itertools.product((0, 1), repeat=model.n_vars):
        if all(sum(c * bits[v] for v, c in row.terms) <= row.rhs for row in model.constraints):
            yield bits


def test_fig1_model(fig1):
    model = build_ilp_model(fig1)
    assert model.matches == ((1, 1), (1, 3), (2, 4), (3, 2), (4, 1), (4, 3))
    assert model.n_vars == 12
    M = len(model.matches)
    pairs = sum(conflicting(a, b) for a, b in itertools.combinations(model.matches, 2))
    assert pairs == 10
    assert (model.count("activation"), model.count("start"), model.count("conflict"), model.count("region")) == (
        M,
        1,
        pairs,
        M,
    )
    assert len(model.constraints) == 2 * M + 1 + pairs == 23
    assert "conf_1_1_1_3" in {c.name for c in model.constraints}
    assert brute_force_ilp(model) == 3


def test_rows_reference_declared_variables(fig2):
    model = build_ilp_model(fig2)
    assert all(0 <= v < model.n_vars for row in model.constraints for v, _ in row.terms)


def test_empty_match_set():
    model = build_ilp_model(const_instance(["AAA", "BBB"]))
    assert model.n_vars == 0
    assert [c.kind for c in model.constraints] == ["start"]
    assert brute_force_ilp(model) == 0
    text = write_lp_text(model)
    assert " obj: 0" in text and "Binaries\nEnd\n" in text


def test_needs_two_sequences():
    with pytest.raises(ValueError):
        build_ilp_model(const_instance(["AB", "AB", "AB"]))


def test_lp_text(fig1):
    text = write_lp_text(build_ilp_model(fig1))
    assert text == write_lp_text(build_ilp_model(fig1))
    head, binaries = text.split("Binaries\n")
    assert len(binaries.split()) == 12 + 1  # names plus End
    assert binaries.split()[:2] == ["x_1_1", "x_1_3"]
    assert text.startswith("\\ VGLCS model") and "\nMaximize\n obj: x_1_1 + x_1_3" in text
    assert "\nSubject To\n" in head
    assert " conf_1_1_1_3: x_1_1 + x_1_3 <= 1" in text
    assert all(len(ln) <= 90 for ln in text.splitlines())


def test_lp_text_wraps_long_rows():
    inst = const_instance(["A" * 12, "A" * 12], 20)
    text = write_lp_text(build_ilp_model(inst))
    assert max(len(ln) for ln in text.splitlines()) <= 90
    assert text.count("\n   ") > 0


def test_cap():
    model = build_ilp_model(const_instance(["AAAA", "AAAA"]))
    with pytest.raises(ValueError):
        brute_force_ilp(model, cap=30)
    assert brute_force_ilp(model, cap=32) == 4


def test_matches_dp_on_random_instances():
    rng = random.Random(0)
    for _ in range(40):
        inst = random_instance(rng, m=2, n_max=7, alphabet="ABC", g_max=3)
        assert brute_force_ilp(build_ilp_model(inst), cap=200) == len(dp_basic(inst))


def literal_region(model):
    rows = []
    for c in model.constraints:
        if c.kind == "region":
            *xs, (s, _) = c.terms
            c = Constraint(c.name, c.kind, tuple(xs) + ((s, 1),), 1)
        rows.append(c)
    return IlpModel(model.matches, tuple(rows))


def test_unit_weight_region_row_caps_chains():
    inst = Instance(("AAA", "AAA"), ((5,) * 3, (5,) * 3))
    model = build_ilp_model(inst)
    assert brute_force_ilp(model) == 3 == len(dp_basic(inst))
    assert brute_force_ilp(literal_region(model)) == 2


def test_feasible_assignments_decode_to_chains():
    rng = random.Random(1)
    checked = 0
    while checked < 15:
        inst = random_instance(rng, m=2, n_max=4, alphabet="AB", g_max=2)
        model = build_ilp_model(inst)
        if not 0 < model.n_vars <= 14:
            continue
        checked += 1
        g1, g2 = inst.gaps
        M = len(model.matches)
        for bits in feasible_assignments(model):
            chain = [model.matches[k] for k in range(M) if bits[k]]
            for (i, j), (ip, jp) in zip(chain, chain[1:]):
                assert i < ip and j < jp
                assert ip - i <= g1[ip - 1] + 1 and jp - j <= g2[jp - 1] + 1

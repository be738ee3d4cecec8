import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import instances
from hypothesis import given
from hypothesis import strategies as st

from vglcs import kernels
from vglcs.core import succ_array

PAIRS = {
    "succ": (kernels._succ_nb, kernels._succ_np),
    "plain": (kernels._plain_next_nb, kernels._plain_next_np),
    "expand": (kernels._expand_nb, kernels._expand_np),
    "dedup": (kernels._dedup_nb, kernels._dedup_np),
    "dp_basic": (kernels._dp_basic_nb, kernels._dp_basic_np),
    "dp_ismq": (kernels._dp_ismq_nb, kernels._dp_ismq_np),
}


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def dp_args(inst):
    c, g = inst.codes, inst.gap_array
    n1, n2 = (int(x) for x in inst.lengths)
    return (
        np.ascontiguousarray(c[0, : n1 + 2]),
        np.ascontiguousarray(c[1, : n2 + 2]),
        np.ascontiguousarray(g[0, : n1 + 2]),
        np.ascontiguousarray(g[1, : n2 + 2]),
        n1,
        n2,
    )


@given(instances(m=1, m_max=4, n_max=25, alphabet="ABCD", g_max=5))
def test_tables_agree(inst):
    args = (inst.codes, inst.gap_array, inst.lengths, inst.sigma)
    nb, npf = PAIRS["succ"]
    assert same(nb(*args), npf(*args))
    nb, npf = PAIRS["plain"]
    assert same(nb(inst.codes, inst.lengths, inst.sigma), npf(inst.codes, inst.lengths, inst.sigma))


@given(instances(m=2, m_max=4, n_max=20, alphabet="ABC", g_max=4), st.integers(0, 2**31), st.booleans())
def test_expand_agrees(inst, seed, dominance):
    rng = np.random.default_rng(seed)
    succ = succ_array(inst)
    hi = inst.lengths + 2
    pos = np.stack([rng.integers(1, h, size=30) for h in hi], axis=1).astype(np.int32)
    nb, npf = PAIRS["expand"]
    assert same(nb(pos, succ, dominance), npf(pos, succ, dominance))


@given(st.lists(st.tuples(*[st.integers(0, 4)] * 3), max_size=60))
def test_dedup_agrees(rows):
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    nb, npf = PAIRS["dedup"]
    assert same(nb(arr), npf(arr))


@given(instances(m=2, n_max=30, alphabet="AB", g_max=4))
def test_dp_kernels_agree(inst):
    args = dp_args(inst)
    basic_nb, basic_np = PAIRS["dp_basic"]
    ismq_nb, ismq_np = PAIRS["dp_ismq"]
    ref = basic_nb(*args)
    assert same(ref, basic_np(*args))
    assert same(ismq_nb(*args)[0], ref[0])
    assert same(ismq_nb(*args), ismq_np(*args))
    assert same(ismq_np(*args, debug=True), ismq_np(*args))


def test_backend_flag():
    assert kernels.backend() in ("numba", "numpy")
    code = "from vglcs import kernels; print(kernels.backend())"
    for flag, want in (("1", "numpy"), ("true", "numpy")):
        env = dict(os.environ, VGLCS_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == want
    if kernels.HAVE_NUMBA:
        env = dict(os.environ, VGLCS_DISABLE_NUMBA="0")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numba"


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
def test_numba_kernels_are_compiled():
    assert hasattr(kernels._succ_nb, "py_func")

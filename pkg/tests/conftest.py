import itertools
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from vglcs import Instance

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def const_instance(seqs, g=1):
    return Instance(tuple(seqs), tuple(tuple([g] * len(s)) for s in seqs))


@pytest.fixture
def fig1():
    return const_instance(["ABCA", "ACAB"])


@pytest.fixture
def fig2():
    return const_instance(["ATGGAAA", "ATCCAAA"])


def random_instance(rng: random.Random, m=2, n_max=8, alphabet="AB", g_max=3, n_min=1):
    seqs, gaps = [], []
    for _ in range(m):
        n = rng.randint(n_min, n_max)
        seqs.append("".join(rng.choice(alphabet) for _ in range(n)))
        gaps.append(tuple(rng.randint(0, g_max) for _ in range(n)))
    return Instance(tuple(seqs), tuple(gaps))


@st.composite
def instances(draw, m=2, n_max=8, alphabet="AB", g_max=3, m_max=None):
    m = draw(st.integers(m, m_max)) if m_max else m
    seqs, gaps = [], []
    for _ in range(m):
        s = draw(st.text(alphabet=alphabet, min_size=1, max_size=n_max))
        g = draw(st.lists(st.integers(0, g_max), min_size=len(s), max_size=len(s)))
        seqs.append(s)
        gaps.append(tuple(g))
    return Instance(tuple(seqs), tuple(gaps))


def embeddings(s, g, text):
    """Every gap-valid embedding of ``text`` into ``s`` (1-based), by brute force."""
    out = []
    for pos in itertools.combinations(range(1, len(s) + 1), len(text)):
        if any(s[p - 1] != c for p, c in zip(pos, text)):
            continue
        if all(b - a <= g[b - 1] + 1 for a, b in zip(pos, pos[1:])):
            out.append(pos)
    return out


def check_embedding(inst, text, emb):
    """Solution invariants for one embedding per sequence."""
    assert len(emb) == inst.m
    for s, g, e in zip(inst.sequences, inst.gaps, emb):
        assert len(e) == len(text)
        assert all(s[p - 1] == c for p, c in zip(e, text))
        assert all(0 < b - a <= g[b - 1] + 1 for a, b in zip(e, e[1:]))

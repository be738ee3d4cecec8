"""Time the numba kernels against their numpy fallbacks.

Part 1 calls both flavours of every kernel in this process (numba compile
time is excluded by a warm-up call) and checks that they agree.  Part 2 runs
a small end-to-end workload twice in fresh interpreters, once per backend,
selected with the VGLCS_DISABLE_NUMBA flag.

    python benchmarks/bench_backends.py [--repeat 3] [--skip-e2e]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from vglcs import kernels
from vglcs.core import succ_array
from vglcs.genbench import GenSpec, generate_instance

E2E = """
import time
from vglcs import kernels
from vglcs.exact import dp_basic, dp_ismq
from vglcs.genbench import GenSpec, generate_instance
from vglcs.imsbs import imsbs_solve
t0 = time.perf_counter()
out = []
for k in range(3):
    two = generate_instance(GenSpec(2, 500, 2), k)
    out += [len(dp_basic(two)), len(dp_ismq(two))]
    out.append(len(imsbs_solve(generate_instance(GenSpec(3, 100, 2), k))[0]))
print(kernels.backend(), round(time.perf_counter() - t0, 3), out)
"""


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn()
        times.append(time.perf_counter() - t0)
    return min(times), res


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def kernel_cases():
    big = generate_instance(GenSpec(5, 500, 4), 0)
    two = generate_instance(GenSpec(2, 500, 2), 0)
    c, g = two.codes, two.gap_array
    n1, n2 = (int(x) for x in two.lengths)
    dp_args = (c[0].copy(), c[1].copy(), g[0].copy(), g[1].copy(), n1, n2)
    succ = succ_array(big)
    rng = np.random.default_rng(0)
    pos = rng.integers(1, 480, size=(5000, big.m)).astype(np.int32)
    rows = rng.integers(0, 40, size=(20000, 4)).astype(np.int64)
    return [
        ("succ_table", (big.codes, big.gap_array, big.lengths, big.sigma)),
        ("plain_next_table", (big.codes, big.lengths, big.sigma)),
        ("expand_level", (pos, succ, True)),
        ("dedup_rows", (rows,)),
        ("dp_basic_table", dp_args),
        ("dp_ismq_table", dp_args),
    ]


KERNELS = {
    "succ_table": (kernels._succ_nb, kernels._succ_np),
    "plain_next_table": (kernels._plain_next_nb, kernels._plain_next_np),
    "expand_level": (kernels._expand_nb, kernels._expand_np),
    "dedup_rows": (kernels._dedup_nb, kernels._dedup_np),
    "dp_basic_table": (kernels._dp_basic_nb, kernels._dp_basic_np),
    "dp_ismq_table": (kernels._dp_ismq_nb, kernels._dp_ismq_np),
}


def run_kernels(repeat):
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy column is meaningful")
    print(f"{'kernel':<18}{'numba s':>11}{'numpy s':>11}{'speedup':>9}  agree")
    for name, args in kernel_cases():
        nb, npf = KERNELS[name]
        nb(*args)  # compile
        t_nb, r_nb = best_of(lambda: nb(*args), repeat)
        t_np, r_np = best_of(lambda: npf(*args), repeat)
        print(f"{name:<18}{t_nb:>11.5f}{t_np:>11.5f}{t_np / max(t_nb, 1e-9):>9.1f}  {same(r_nb, r_np)}")


def run_e2e():
    print("\nend to end (fresh interpreter per backend):")
    for flag in ("0", "1"):
        env = dict(os.environ, VGLCS_DISABLE_NUMBA=flag)
        t0 = time.perf_counter()
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        wall = time.perf_counter() - t0
        print(f"  VGLCS_DISABLE_NUMBA={flag}: {out.stdout.strip()}  (wall incl. import {wall:.2f} s)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    run_kernels(args.repeat)
    if not args.skip_e2e:
        run_e2e()


if __name__ == "__main__":
    main()

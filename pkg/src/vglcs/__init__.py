"""Solvers for the longest common subsequence with variable gap constraints."""

from .beam import BeamResult, backward_refine, rooted_beam_search
from .core import (
    Heuristic,
    Instance,
    InstanceFormatError,
    Semantics,
    Solution,
    SolverConfig,
    StateNode,
    VerifyReport,
    parse_instance,
    read_instance,
    reverse_instance,
    save_instance,
    verify_solution,
    write_instance,
)
from .exact import brute_force_existential, brute_force_leftmost, dp_basic, dp_ismq
from .genbench import GenSpec, generate_instance, full_grid, run_benchmark
from .ilp import brute_force_ilp, build_ilp_model, write_lp_text
from .imsbs import RootPool, RunTrace, bs_baseline, imsbs_solve, preset
from .kernels import backend

__version__ = "0.1.0"

__all__ = [
    "BeamResult",
    "GenSpec",
    "Heuristic",
    "Instance",
    "InstanceFormatError",
    "RootPool",
    "RunTrace",
    "Semantics",
    "Solution",
    "SolverConfig",
    "StateNode",
    "VerifyReport",
    "backend",
    "backward_refine",
    "brute_force_existential",
    "brute_force_ilp",
    "brute_force_leftmost",
    "bs_baseline",
    "build_ilp_model",
    "dp_basic",
    "dp_ismq",
    "generate_instance",
    "imsbs_solve",
    "full_grid",
    "parse_instance",
    "preset",
    "read_instance",
    "reverse_instance",
    "rooted_beam_search",
    "run_benchmark",
    "save_instance",
    "verify_solution",
    "write_instance",
]

"""Backend selection for the hot counting and search kernels.

Two interchangeable implementations exist: numba-JIT (fast, default when
numba imports) and pure numpy/Python.  Selection order:

  1. explicit backend= argument on each dispatch function,
  2. the AFFLAB_KERNEL environment variable ("numba" or "numpy"),
  3. numba when importable, else numpy.

Both backends are required to return identical values on identical inputs;
tests and `python -m afflab.bench` exercise the pair side by side.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from . import _kernels_numpy

try:
    from . import _kernels_numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    _kernels_numba = None
    HAS_NUMBA = False


def _env_backend() -> str:
    choice = os.environ.get("AFFLAB_KERNEL", "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not HAS_NUMBA:
            warnings.warn("AFFLAB_KERNEL=numba but numba is unavailable; using numpy")
            return "numpy"
        return choice
    if choice:
        warnings.warn("unknown AFFLAB_KERNEL=%r; expected 'numba' or 'numpy'" % choice)
    return "numba" if HAS_NUMBA else "numpy"


def active_backend(backend: str | None = None) -> str:
    if backend is None:
        return _env_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy', got %r" % backend)
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def _impl(backend: str | None):
    return _kernels_numba if active_backend(backend) == "numba" else _kernels_numpy


def hom_pair_counts(lam: np.ndarray, q: int, n: int, host: np.ndarray,
                    backend: str | None = None) -> tuple[int, int]:
    """(total, degenerate) counts of (z, u) span placements inside host."""
    total, degen = _impl(backend).hom_pair_counts(
        np.ascontiguousarray(lam, dtype=np.int64), q, n,
        np.ascontiguousarray(host, dtype=np.uint8))
    return int(total), int(degen)


def build_span_masks(lam: np.ndarray, q: int, n: int,
                     backend: str | None = None) -> np.ndarray:
    """uint64 span bitmasks for every (z, u) pair; requires q^n <= 64."""
    if q**n > 64:
        raise ValueError("span masks need q^n <= 64")
    return _impl(backend).build_span_masks(
        np.ascontiguousarray(lam, dtype=np.int64), q, n)


def counts_all_hosts(masks: np.ndarray, n_points: int,
                     backend: str | None = None) -> np.ndarray:
    """Containment counts of the given masks inside every host bitmask."""
    return _impl(backend).counts_all_hosts(
        np.ascontiguousarray(masks, dtype=np.uint64), n_points)


def free_set_search(n_points: int, point_ptr: np.ndarray, point_copies: np.ndarray,
                    copy_sizes: np.ndarray, mode: int, target: int, budget: int,
                    fix_first: bool, allowed_second: np.ndarray,
                    backend: str | None = None):
    """Branch-and-bound over point subsets avoiding the given copies."""
    best, best_set, nodes, completed, found = _impl(backend).free_set_search(
        int(n_points),
        np.ascontiguousarray(point_ptr, dtype=np.int64),
        np.ascontiguousarray(point_copies, dtype=np.int64),
        np.ascontiguousarray(copy_sizes, dtype=np.int64),
        int(mode), int(target), int(budget), bool(fix_first),
        np.ascontiguousarray(allowed_second, dtype=np.uint8))
    return int(best), [int(p) for p in best_set], int(nodes), bool(completed), bool(found)


def hom_total_gf2_bitset(lam_masks: np.ndarray, r1: int, n: int, words: np.ndarray,
                         backend: str | None = None) -> tuple[int, int]:
    """Word-parallel GF(2) hom count over xor-shifted bitset intersections."""
    total, degen = _impl(backend).hom_total_gf2_bitset(
        np.ascontiguousarray(lam_masks, dtype=np.int64), int(r1), int(n),
        np.ascontiguousarray(words, dtype=np.uint64))
    return int(total), int(degen)

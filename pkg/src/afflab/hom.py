"""Exact and Monte-Carlo counting of affine homomorphisms B -> A.

An affine homomorphism corresponds to a pair (z, u): z is the image of the
first basis point and u the tuple of images of the basis differences; the
map sends each b to z + sum lam_i(b) u_i.  It is non-degenerate exactly when
the u_i are linearly independent.  Exact mode enumerates all (z, u); the
Monte-Carlo mode samples them uniformly with a counter-based generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import kernels, linalg
from .config import AffineConfiguration
from .errors import BudgetError, DomainError, InvariantViolation
from .space import PointSet, point_addmul, point_digits, point_sub

DEFAULT_BUDGET = 1 << 36  # membership tests per exact call

# bitset kernel pays off once the z-loop spans multiple words
_BITSET_MIN_POINTS = 128


@dataclass
class HomCountReport:
    """Result of one homomorphism count."""

    total: int | float
    degenerate: int | float | None
    nondegenerate: int | float | None
    aut_order: int | None
    copies: int | None
    method: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"total": self.total, "degenerate": self.degenerate,
                "nondegenerate": self.nondegenerate, "aut_order": self.aut_order,
                "copies": self.copies, "method": self.method}


def _check_same_field(b: AffineConfiguration, a: PointSet) -> None:
    if b.q != a.q:
        raise DomainError("configuration and host set have different q")


def lam_matrix(b: AffineConfiguration) -> np.ndarray:
    """(|B|, r-1) coefficient matrix lam_i(b) over the cached affine basis."""
    r1 = max(b.rank_aff - 1, 0)
    out = np.zeros((len(b.points), r1), dtype=np.int64)
    for j, lam in enumerate(b.coords):
        out[j, :] = lam
    return out


def exact_work(b: AffineConfiguration, a: PointSet) -> int:
    """Membership tests an exact count performs: N^rank * |B|."""
    size = a.ambient_size
    return size**b.rank_aff * max(len(b.points), 1)


def _require_budget(b: AffineConfiguration, a: PointSet, budget: int) -> None:
    if exact_work(b, a) > budget:
        raise BudgetError(
            "exact mode needs N^r = %d span placements (%d membership tests);"
            " budget is %d tests" % (
                a.ambient_size**b.rank_aff, exact_work(b, a), budget))


def exact_pair_counts(b: AffineConfiguration, a: PointSet,
                      budget: int = DEFAULT_BUDGET,
                      backend: str | None = None) -> tuple[int, int]:
    """(total, degenerate) homomorphism counts by exhaustive (z, u) sweep."""
    _check_same_field(b, a)
    if not b.points:
        return 1, 0
    _require_budget(b, a, budget)
    lam = lam_matrix(b)
    if b.q == 2 and a.ambient_size >= _BITSET_MIN_POINTS:
        lam_masks = np.zeros(len(b.points), dtype=np.int64)
        for j, row in enumerate(b.coords):
            m = 0
            for i, li in enumerate(row):
                if li:
                    m |= 1 << i
            lam_masks[j] = m
        words = _host_words(a)
        return kernels.hom_total_gf2_bitset(lam_masks, b.rank_aff - 1, a.n,
                                            words, backend=backend)
    return kernels.hom_pair_counts(lam, b.q, a.n, a.to_numpy_mask(), backend=backend)


def _host_words(a: PointSet) -> np.ndarray:
    size = a.ambient_size
    n_words = max(1, size >> 6)
    raw = a.bits.to_bytes(n_words * 8, "little")
    return np.frombuffer(raw, dtype=np.uint64).copy()


def hom_count(b: AffineConfiguration, a: PointSet, mode: str = "exact",
              samples: int = 100_000, seed: int = 0,
              budget: int = DEFAULT_BUDGET, with_aut: bool = True,
              backend: str | None = None) -> HomCountReport:
    """Count affine homomorphisms b -> a.

    Exact mode returns exact big-integer totals plus the degenerate /
    non-degenerate split and (when with_aut) the copy count.  Monte-Carlo
    mode returns an unbiased estimate of the total with its standard error.
    """
    _check_same_field(b, a)
    if mode == "exact":
        total, degen = exact_pair_counts(b, a, budget=budget, backend=backend)
        nondeg = total - degen
        aut = copies = None
        if with_aut:
            aut = aut_order(b)
            if nondeg % aut:
                raise InvariantViolation(
                    "non-degenerate count %d not divisible by |Aut| = %d" % (nondeg, aut))
            copies = nondeg // aut
        return HomCountReport(total, degen, nondeg, aut, copies, {"mode": "exact"})
    if mode in ("monte_carlo", "mc"):
        est, stderr, hits = _monte_carlo_total(b, a, samples, seed)
        aut = aut_order(b) if with_aut else None
        return HomCountReport(
            est, None, None, aut, None,
            {"mode": "monte_carlo", "samples": samples, "seed": seed,
             "stderr": stderr, "hits": hits})
    raise DomainError("mode must be 'exact' or 'monte_carlo', got %r" % mode)


def _digits_array(idx: np.ndarray, q: int, n: int) -> np.ndarray:
    out = np.empty((idx.shape[0], n), dtype=np.int64)
    rest = idx.copy()
    for i in range(n):
        out[:, i] = rest % q
        rest //= q
    return out


def _monte_carlo_total(b: AffineConfiguration, a: PointSet, samples: int,
                       seed: int) -> tuple[float, float, int]:
    """Uniform (z, u) sampling; estimate = hit rate * N^r."""
    if samples <= 0:
        raise DomainError("monte_carlo needs samples >= 1")
    if not b.points:
        return 1.0, 0.0, samples
    q, n = a.q, a.n
    size = a.ambient_size
    r1 = b.rank_aff - 1
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.integers(0, size, size=samples, dtype=np.int64)
    u = rng.integers(0, size, size=(samples, r1), dtype=np.int64)
    host = a.to_numpy_mask().astype(bool)
    ok = np.ones(samples, dtype=bool)
    if q == 2:
        for j, row in enumerate(b.coords):
            idx = z.copy()
            for i, li in enumerate(row):
                if li:
                    idx ^= u[:, i]
            ok &= host[idx]
    else:
        z_digs = _digits_array(z, q, n)
        u_digs = [_digits_array(u[:, i], q, n) for i in range(r1)]
        pows = q ** np.arange(n, dtype=np.int64)
        for row in b.coords:
            digs = z_digs.copy()
            for i, li in enumerate(row):
                if li:
                    digs += li * u_digs[i]
            idx = (digs % q) @ pows
            ok &= host[idx]
    hits = int(ok.sum())
    scale = float(size)**b.rank_aff
    p_hat = hits / samples
    est = p_hat * scale
    stderr = scale * math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return est, stderr, hits


def degenerate_hom_count(b: AffineConfiguration, a: PointSet,
                         budget: int = DEFAULT_BUDGET,
                         backend: str | None = None) -> int:
    """Homomorphisms whose basis images are affinely dependent."""
    if not b.points:
        return 0
    _, degen = exact_pair_counts(b, a, budget=budget, backend=backend)
    return degen


# -- automorphisms and copies --------------------------------------------------

def _iter_independent_tuples(candidates: Sequence[int], q: int, n: int,
                             r: int) -> Iterator[tuple[int, ...]]:
    """Ordered r-tuples from candidates whose pairwise differences from the
    first entry are linearly independent (i.e. affinely independent tuples)."""
    cand = list(candidates)

    def extend(chosen: list[int], reduced, pivots):
        if len(chosen) == r:
            yield tuple(chosen)
            return
        for y in cand:
            if chosen:
                diff = point_digits(point_sub(y, chosen[0], q, n), q, n)
                rem = linalg.reduce_against(diff, reduced, pivots, q)
                if not any(rem):
                    continue
                rows = [list(row) for row in reduced] + [list(diff)]
                new_reduced, new_pivots = linalg.rref(rows, q)
                yield from extend(chosen + [y], new_reduced, new_pivots)
            else:
                yield from extend([y], reduced, pivots)

    yield from extend([], [], [])


@lru_cache(maxsize=4096)
def aut_order(b: AffineConfiguration) -> int:
    """|Aut_aff(B)|: non-degenerate homomorphisms of B onto its own points.

    Enumerates affinely independent basis-image tuples drawn from B itself
    (any automorphism maps basis points into B), then verifies the induced
    map lands inside B.  A non-degenerate self-map is automatically a
    bijection onto B.
    """
    if not b.points:
        return 1
    q, m, r = b.q, b.m, b.rank_aff
    pts = set(b.points)
    count = 0
    for images in _iter_independent_tuples(b.points, q, m, r):
        if _image_inside(b, images, pts, q, m):
            count += 1
    return count


def _image_inside(b: AffineConfiguration, images: tuple[int, ...],
                  host_pts: set[int], q: int, n: int) -> bool:
    z = images[0]
    u = [point_sub(y, z, q, n) for y in images[1:]]
    for lam in b.coords:
        p = z
        for li, ui in zip(lam, u):
            if li:
                p = point_addmul(p, li, ui, q, n)
        if p not in host_pts:
            return False
    return True


def contains_copy(b: AffineConfiguration, a: PointSet,
                  budget: int = DEFAULT_BUDGET) -> bool:
    """Whether a holds an affine copy of b (first-hit exit).

    Walks affinely independent basis-image tuples drawn from a, so the work
    is bounded by |A|^r rather than N^r.
    """
    _check_same_field(b, a)
    if not b.points:
        return True
    if len(b.points) > a.size:
        return False
    pts = set(a.points())
    work = 0
    cap = max(budget // max(len(b.points), 1), 1)
    for images in _iter_independent_tuples(list(a.points()), a.q, a.n, b.rank_aff):
        work += 1
        if work > cap:
            raise BudgetError("contains_copy exceeded %d tuple probes" % cap)
        if _image_inside(b, images, pts, a.q, a.n):
            return True
    return False


def copy_count(b: AffineConfiguration, a: PointSet,
               budget: int = DEFAULT_BUDGET, backend: str | None = None) -> int:
    """Number of subsets of a affinely isomorphic to b."""
    report = hom_count(b, a, mode="exact", budget=budget, backend=backend)
    return report.copies

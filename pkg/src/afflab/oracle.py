"""Slow, obviously-correct reference implementations used as ground truth.

These ship with the package (not test-only) so any witness or count can be
re-verified from the command line with --oracle.  Everything here is written
for clarity: direct enumeration, no kernels, no incremental state.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from dataclasses import dataclass

from . import linalg
from .config import AffineConfiguration
from .errors import BudgetError, DomainError
from .space import (
    PointSet,
    enumerate_subspaces,
    point_add,
    point_addmul,
    point_digits,
    point_sub,
)

ORACLE_SIZE_LIMIT = 1 << 24  # N^r ceiling for direct map enumeration


@dataclass
class OracleReport:
    value: int
    elapsed: float
    instance_digest: str


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:16]


def oracle_hom_count(b: AffineConfiguration, a: PointSet) -> OracleReport:
    """Count affine homomorphisms by enumerating basis-image functions.

    Every function from the affine basis of B into F_q^n extends uniquely to
    an affine map on the span of B; it restricts to a homomorphism B -> A iff
    each point's affine combination lands in A.  Independently of the count,
    relation preservation is re-verified on a generated set of affine
    relations for each accepted map.
    """
    if b.q != a.q:
        raise DomainError("mismatched q")
    t0 = time.time()
    q, n = a.q, a.n
    size = a.ambient_size
    if not b.points:
        return OracleReport(1, time.time() - t0, _digest(b.points, a.bits))
    r = b.rank_aff
    if size**r > ORACLE_SIZE_LIMIT:
        raise BudgetError("oracle limited to N^r <= %d" % ORACLE_SIZE_LIMIT)
    basis = b.affine_basis()
    relations = _affine_relations(b)
    count = 0
    for images in itertools.product(range(size), repeat=r):
        z = images[0]
        u = [point_sub(y, z, q, n) for y in images[1:]]
        mapped = []
        ok = True
        for lam in b.coords:
            p = z
            for li, ui in zip(lam, u):
                if li:
                    p = point_addmul(p, li, ui, q, n)
            if p not in a:
                ok = False
                break
            mapped.append(p)
        if not ok:
            continue
        point_to_image = dict(zip(b.points, mapped))
        for rel in relations:
            acc = 0
            for pt, coeff in rel:
                acc = point_addmul(acc, coeff, point_to_image[pt], q, n)
            if acc != 0:
                raise AssertionError("affine relation not preserved; basis %r" % (basis,))
        count += 1
    return OracleReport(count, time.time() - t0, _digest(b.points, a.bits))


def _affine_relations(b: AffineConfiguration) -> list[list[tuple[int, int]]]:
    """One affine relation per point: pt = x0 + sum lam_i (x_i - x0) rearranged.

    Coefficients are (pt: 1, x_0: sum(lam) - 1, x_i: -lam_i); they sum to 0.
    Basis points yield trivial relations, which merge away.
    """
    q = b.q
    basis = b.affine_basis()
    rels = []
    for pt, lam in zip(b.points, b.coords):
        terms = [(pt, 1), (basis[0], (sum(lam) - 1) % q)]
        for li, xi in zip(lam, basis[1:]):
            terms.append((xi, (-li) % q))
        merged = _merge_terms(terms, q)
        if merged:
            rels.append(merged)
    return rels


def _merge_terms(rel: list[tuple[int, int]], q: int) -> list[tuple[int, int]]:
    acc: dict[int, int] = {}
    for p, c in rel:
        acc[p] = (acc.get(p, 0) + c) % q
    return [(p, c) for p, c in acc.items() if c]


def oracle_omega(s: PointSet, kind: str = "linear") -> int | None:
    """Largest subspace dimension inside s by full subspace enumeration."""
    if kind not in ("linear", "affine"):
        raise DomainError("kind must be 'linear' or 'affine'")
    if kind == "affine" and s.size == 0:
        return None
    for t in range(s.n, 0, -1):
        for sub in enumerate_subspaces(s.q, s.n, t, kind):
            pts = sub.points()
            if kind == "linear":
                if all(p in s for p in pts if p != 0):
                    return t
            else:
                if all(p in s for p in pts):
                    return t
    return 0


def oracle_direction_set(s: PointSet) -> PointSet:
    """Direction set by the definitional double loop over (x, d)."""
    q, n = s.q, s.n
    size = s.ambient_size
    hits = set()
    for d in range(size):
        for x in range(size):
            if all(point_addmul(x, lam, d, q, n) in s for lam in range(q)):
                hits.add(d)
                break
    return PointSet.from_points(q, n, hits)


def oracle_sumset(s: PointSet) -> PointSet:
    """Pairwise sumset {x + y : x, y in s} (the q = 2 direction set)."""
    pts = list(s.points())
    out = {point_add(x, y, s.q, s.n) for x in pts for y in pts}
    return PointSet.from_points(s.q, s.n, out)


def oracle_free(b: AffineConfiguration, a: PointSet) -> bool:
    """True iff a contains no affine copy of b, by full copy enumeration.

    Enumerates every injective assignment of basis images inside a and
    rejects those that are affinely dependent or whose induced map leaves a
    or collapses points.
    """
    if b.q != a.q:
        raise DomainError("mismatched q")
    if not b.points:
        return False
    q, n = a.q, a.n
    pts = list(a.points())
    host = set(pts)
    r = b.rank_aff
    for images in itertools.permutations(pts, r):
        z = images[0]
        diffs = [point_digits(point_sub(y, z, q, n), q, n) for y in images[1:]]
        if linalg.rank(diffs, q) < r - 1:
            continue
        u = [point_sub(y, z, q, n) for y in images[1:]]
        mapped = set()
        ok = True
        for lam in b.coords:
            p = z
            for li, ui in zip(lam, u):
                if li:
                    p = point_addmul(p, li, ui, q, n)
            if p not in host:
                ok = False
                break
            mapped.add(p)
        if ok and len(mapped) == len(b.points):
            return False
    return True

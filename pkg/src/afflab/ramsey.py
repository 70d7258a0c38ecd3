"""Vector-space Ramsey numbers, Bose-Burton extrema, and the m_q(t) search.

Colorings are enumerated over 1-subspaces (projective points), never over
vectors; a color class "contains a t-space" exactly when omega_linear of its
projectively determined vector class reaches t.  Every returned Ramsey value
is certified in both directions: an exhaustively closed DFS at n and a
re-verified good coloring at n-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import kernels
from .errors import BudgetError, DomainError, InvariantViolation
from .report import SearchReport, Stopwatch
from .space import (
    PointSet,
    check_space,
    direction_set,
    enumerate_subspaces,
    gaussian_binomial,
    has_linear_subspace,
    is_projectively_determined,
    line_through,
    omega_arrow,
    omega_linear,
    projective_points,
    projectivize,
)

import numpy as np


@dataclass(frozen=True)
class RamseyQuery:
    q: int
    targets: tuple[int, ...]
    n_max: int = 6
    budget: int = 1 << 28  # DFS nodes per dimension
    seed: int = 0

    def __post_init__(self):
        if not self.targets or any(t < 1 for t in self.targets):
            raise DomainError("targets must be a nonempty tuple of dims >= 1")


@dataclass
class ColoringWitness:
    """A projectively determined k-coloring with every class below target."""

    q: int
    n: int
    classes: tuple[PointSet, ...]

    def validate(self, targets: Sequence[int]) -> None:
        size = self.q**self.n
        union = 0
        for i, cls in enumerate(self.classes):
            if cls.q != self.q or cls.n != self.n:
                raise InvariantViolation("class %d lives in the wrong space" % i)
            if cls.bits & union:
                raise InvariantViolation("color classes overlap")
            union |= cls.bits
            if not is_projectively_determined(cls):
                raise InvariantViolation("class %d is not projectively determined" % i)
            if omega_linear(cls) >= targets[i]:
                raise InvariantViolation("class %d already holds a %d-space" % (i, targets[i]))
        if union != (1 << size) - 2 and size > 1:
            raise InvariantViolation("classes do not partition the nonzero points")

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n,
                "classes": [c.to_json() for c in self.classes]}


def _good_coloring(q: int, n: int, targets: Sequence[int],
                   budget: int) -> tuple[ColoringWitness | None, int]:
    """First (lexicographically minimal) coloring with every class below its
    target, or None when the DFS closes without one.  Colors are assigned to
    projective points in canonical order; a branch dies as soon as some class
    reaches its target; among equal targets, a new color may only be the
    first unused one of its group (color-swap symmetry breaking)."""
    if n == 0:
        return ColoringWitness(q, 0, tuple(PointSet.empty(q, 0)
                                           for _ in targets)), 0
    reps = projective_points(q, n)
    k = len(targets)
    line_bits = []
    for rep in reps:
        bits = 0
        for v in line_through(rep, q, n):
            bits |= 1 << v
        line_bits.append(bits)
    class_bits = [0] * k
    colors = [-1] * len(reps)
    nodes = 0

    def allowed_colors(pos: int) -> list[int]:
        used = set(colors[:pos])
        out = []
        seen_new_target: set[int] = set()
        for c in range(k):
            if c in used:
                out.append(c)
            elif targets[c] not in seen_new_target:
                out.append(c)
                seen_new_target.add(targets[c])
        return out

    def dfs(pos: int) -> bool:
        nonlocal nodes
        if pos == len(reps):
            return True
        for c in allowed_colors(pos):
            nodes += 1
            if nodes > budget:
                raise BudgetError("coloring DFS exceeded %d nodes" % budget)
            class_bits[c] |= line_bits[pos]
            colors[pos] = c
            grown = PointSet(q, n, class_bits[c])
            if not has_linear_subspace(grown, targets[c]) and dfs(pos + 1):
                return True
            class_bits[c] &= ~line_bits[pos]
            colors[pos] = -1
        return False

    if dfs(0):
        witness = ColoringWitness(q, n, tuple(PointSet(q, n, b) for b in class_bits))
        return witness, nodes
    return None, nodes


def ramsey_search(query: RamseyQuery) -> SearchReport:
    """Least n forcing a monochromatic class: some class i with omega >= t_i.

    Walks n upward; at each n either finds a good coloring (so the Ramsey
    number exceeds n) or closes the DFS, in which case n is the answer and
    the previous dimension's coloring is the certified lower-bound witness.
    """
    watch = Stopwatch()
    q = query.q
    targets = query.targets
    per_n: dict[int, bool] = {}
    lower_witness: ColoringWitness | None = None
    nodes_total = 0
    for n in range(1, query.n_max + 1):
        check_space(q, n)
        try:
            witness, nodes = _good_coloring(q, n, targets, query.budget)
        except BudgetError:
            return SearchReport(-1, None, nodes_total, query.seed, watch.elapsed(),
                                "unknown", {"deepest_closed_n": n - 1, "per_n": per_n})
        nodes_total += nodes
        per_n[n] = witness is not None
        if witness is None:
            if lower_witness is None:
                lower_witness, _ = _good_coloring(q, n - 1, targets, query.budget)
            lower_witness.validate(targets)
            return SearchReport(
                n, None, nodes_total, query.seed, watch.elapsed(), "complete",
                {"targets": list(targets), "per_n": per_n,
                 "lower_bound_witness": lower_witness, "witness_n": n - 1})
        lower_witness = witness
    lower_witness.validate(targets)
    return SearchReport(
        query.n_max + 1, None, nodes_total, query.seed, watch.elapsed(),
        "greater-than-nmax",
        {"targets": list(targets), "per_n": per_n,
         "lower_bound_witness": lower_witness, "witness_n": query.n_max})


# -- Bose-Burton -----------------------------------------------------------------

@dataclass
class BoseBurtonReport:
    q: int
    n: int
    t: int
    max_size: int
    formula_value: int
    formula_ok: bool
    witnesses: list[PointSet]
    uniqueness_ok: bool | None
    maximizer_count: int | None

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "t": self.t, "max_size": self.max_size,
                "formula_value": self.formula_value, "formula_ok": self.formula_ok,
                "witnesses": [w.to_json() for w in self.witnesses[:16]],
                "uniqueness_ok": self.uniqueness_ok,
                "maximizer_count": self.maximizer_count}


EXHAUSTIVE_PROJ_LIMIT = 20


def bose_burton(q: int, n: int, t: int, backend: str | None = None) -> BoseBurtonReport:
    """Largest t-space-free family of 1-subspaces, with all maximizers.

    The maximum must match (q^n - q^(n-t+1)) / (q-1) and, when the projective
    point count allows full enumeration, the maximizers must be exactly the
    complements of the lines of (n-t+1)-dimensional subspaces.
    """
    if t < 1 or n < 0:
        raise DomainError("need t >= 1 and n >= 0")
    check_space(q, n)
    reps = projective_points(q, n)
    formula = (q**n - q**(n - t + 1)) // (q - 1) if n - t + 1 >= 0 else 0
    if t > n:
        # no t-space exists at all: everything is free
        full = projectivize(reps, q, n) if reps else PointSet.empty(q, n)
        return BoseBurtonReport(q, n, t, len(reps), len(reps),
                                False, [full], None, None)
    if len(reps) <= EXHAUSTIVE_PROJ_LIMIT:
        max_size = -1
        maximizers: list[tuple[int, ...]] = []
        for mask in range(1 << len(reps)):
            chosen = [reps[i] for i in range(len(reps)) if (mask >> i) & 1]
            cls = projectivize(chosen, q, n) if chosen else PointSet.empty(q, n)
            if has_linear_subspace(cls, t):
                continue
            if len(chosen) > max_size:
                max_size = len(chosen)
                maximizers = [tuple(chosen)]
            elif len(chosen) == max_size:
                maximizers.append(tuple(chosen))
        uniq = _check_uniqueness(q, n, t, reps, maximizers)
        witnesses = [projectivize(m, q, n) for m in maximizers]
        return BoseBurtonReport(q, n, t, max_size, formula, max_size == formula,
                                witnesses, uniq, len(maximizers))
    # larger instances: branch and bound for the max only
    copies = []
    rep_index = {r: i for i, r in enumerate(reps)}
    for sub in enumerate_subspaces(q, n, t, "linear"):
        mask = 0
        for p in sub.points():
            if p == 0:
                continue
            canon = min(line_through(p, q, n))
            mask |= 1 << rep_index[canon]
        copies.append(mask)
    copies = sorted(set(copies))
    sizes = np.array([m.bit_count() for m in copies], dtype=np.int64)
    ptr_lists: list[list[int]] = [[] for _ in reps]
    for ci, m in enumerate(copies):
        bits = m
        while bits:
            low = bits & -bits
            ptr_lists[low.bit_length() - 1].append(ci)
            bits ^= low
    ptr = np.zeros(len(reps) + 1, dtype=np.int64)
    for i in range(len(reps)):
        ptr[i + 1] = ptr[i] + len(ptr_lists[i])
    flat = np.array([c for lst in ptr_lists for c in lst], dtype=np.int64)
    best, best_set, nodes, completed, _ = kernels.free_set_search(
        len(reps), ptr, flat, sizes, 0, 0, 1 << 34, False,
        np.ones(len(reps), dtype=np.uint8), backend=backend)
    if not completed:
        raise BudgetError("bose_burton search exhausted its node budget")
    witness = projectivize([reps[i] for i in best_set], q, n)
    return BoseBurtonReport(q, n, t, best, formula, best == formula,
                            [witness], None, None)


def _check_uniqueness(q, n, t, reps, maximizers) -> bool:
    expected = set()
    for w in enumerate_subspaces(q, n, n - t + 1, "linear"):
        w_pts = set(w.points())
        expected.add(tuple(r for r in reps if r not in w_pts))
    if len(expected) != gaussian_binomial(n, n - t + 1, q):
        raise InvariantViolation("complement family miscounted")
    return expected == {tuple(m) for m in maximizers}


# -- m_q(t) ------------------------------------------------------------------------

def _direction_witness(q: int, n: int, t: int, size_target: int,
                       budget: int) -> tuple[PointSet | None, int]:
    """A size_target-subset of F_q^n with omega_arrow < t, or None.

    DFS in index order with monotone pruning (adding points only grows the
    direction set) and translation/coordinate symmetry at the first two
    levels."""
    space_size = q**n
    if size_target > space_size:
        return None, 0
    second_reps = {(q**w - 1) // (q - 1) for w in range(1, n + 1)}
    nodes = 0

    def dfs(chosen: list[int], start: int) -> PointSet | None:
        nonlocal nodes
        if len(chosen) == size_target:
            return PointSet.from_points(q, n, chosen)
        for p in range(start, space_size):
            if len(chosen) + (space_size - p) < size_target:
                break
            if len(chosen) == 0 and p != 0:
                break  # translation symmetry: first point is 0
            if len(chosen) == 1 and p not in second_reps:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetError("m_q witness DFS exceeded %d nodes" % budget)
            cand = chosen + [p]
            cand_set = PointSet.from_points(q, n, cand)
            if omega_arrow(cand_set) >= t:
                continue
            found = dfs(cand, p + 1)
            if found is not None:
                return found
        return None

    if size_target == 0:
        return PointSet.empty(q, n), 0
    witness = dfs([], 0)
    return witness, nodes


def mq_search(q: int, t: int, n_max: int, budget: int = 1 << 24,
              seed: int = 0) -> SearchReport:
    """Least n such that every subset of size q^(n-t+1) has omega_arrow >= t.

    Every dimension up to n_max is decided independently (the failure
    predicate is not assumed monotone in n); the report carries the
    per-dimension outcomes and the witness just below the answer.
    """
    if t < 1:
        raise DomainError("t must be >= 1")
    watch = Stopwatch()
    per_n: dict[int, dict] = {}
    nodes_total = 0
    answer = None
    below_witness: PointSet | None = None
    for n in range(1, n_max + 1):
        check_space(q, n)
        size_target = math.ceil(q**(n - t + 1)) if n - t + 1 >= 0 else 1
        try:
            witness, nodes = _direction_witness(q, n, t, size_target, budget)
        except BudgetError:
            return SearchReport(-1, None, nodes_total, seed, watch.elapsed(),
                                "unknown", {"deepest_closed_n": n - 1, "per_n": per_n})
        nodes_total += nodes
        per_n[n] = {"size": size_target, "witness": witness}
        if witness is not None:
            _verify_mq_witness(witness, size_target, t)
            if answer is None:
                below_witness = witness
        elif answer is None:
            answer = n
    if answer is None:
        return SearchReport(n_max + 1, below_witness, nodes_total, seed,
                            watch.elapsed(), "greater-than-nmax",
                            {"per_n": per_n, "t": t})
    return SearchReport(answer, below_witness, nodes_total, seed, watch.elapsed(),
                        "complete", {"per_n": per_n, "t": t,
                                     "witness_n": answer - 1})


def _verify_mq_witness(witness: PointSet, size_target: int, t: int) -> None:
    from .oracle import oracle_direction_set

    if witness.size != size_target:
        raise InvariantViolation("witness has size %d, wanted %d"
                                 % (witness.size, size_target))
    slow = omega_linear(oracle_direction_set(witness))
    if slow >= t:
        raise InvariantViolation("witness direction set reaches dimension %d" % slow)
    if direction_set(witness) != oracle_direction_set(witness):
        raise InvariantViolation("fast and oracle direction sets disagree")

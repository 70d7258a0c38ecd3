"""Arithmetic of F_q^n for small prime q, bitset point sets, subspaces.

Points of F_q^n are encoded as integers in [0, q^n): the point with
coordinates (d_0, ..., d_{n-1}) has index sum(d_i * q^i) (little-endian,
coordinate 0 is the least significant digit).  This encoding fixes the file
formats and all canonical orders used elsewhere in the package.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .errors import DomainError

MAX_Q = 13
MAX_POINTS = 1 << 32

_SMALL_PRIMES = {2, 3, 5, 7, 11, 13}


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_q, 2 <= q <= 13."""

    q: int

    def __post_init__(self) -> None:
        if self.q not in _SMALL_PRIMES:
            raise DomainError("q must be a prime in [2, %d], got %r" % (MAX_Q, self.q))


def check_field(q: int) -> int:
    FieldSpec(q)
    return q


def check_space(q: int, n: int) -> int:
    """Validate (q, n) and return N = q^n."""
    check_field(q)
    if n < 0:
        raise DomainError("dimension must be nonnegative, got %d" % n)
    size = q**n
    if size > MAX_POINTS:
        raise DomainError("q^n = %d exceeds the %d point ceiling" % (size, MAX_POINTS))
    return size


# -- point encoding ----------------------------------------------------------

def point_digits(idx: int, q: int, n: int) -> tuple[int, ...]:
    """Decode an index into its n base-q digits (little-endian)."""
    out = []
    for _ in range(n):
        out.append(idx % q)
        idx //= q
    return tuple(out)


def digits_index(digits: Sequence[int], q: int) -> int:
    """Encode base-q digits (little-endian) into an index."""
    idx = 0
    for d in reversed(digits):
        idx = idx * q + (d % q)
    return idx


def point_add(a: int, b: int, q: int, n: int) -> int:
    if q == 2:
        return a ^ b
    out = 0
    mul = 1
    for _ in range(n):
        out += ((a + b) % q) * mul
        a //= q
        b //= q
        mul *= q
    return out


def point_neg(a: int, q: int, n: int) -> int:
    if q == 2:
        return a
    out = 0
    mul = 1
    for _ in range(n):
        out += (-a % q) * mul
        a //= q
        mul *= q
    return out


def point_sub(a: int, b: int, q: int, n: int) -> int:
    if q == 2:
        return a ^ b
    return point_add(a, point_neg(b, q, n), q, n)


def point_scale(a: int, lam: int, q: int, n: int) -> int:
    lam %= q
    if q == 2:
        return a if lam else 0
    out = 0
    mul = 1
    for _ in range(n):
        out += ((a % q) * lam % q) * mul
        a //= q
        mul *= q
    return out


def point_addmul(a: int, lam: int, b: int, q: int, n: int) -> int:
    """a + lam * b on encoded points."""
    return point_add(a, point_scale(b, lam, q, n), q, n)


# -- point sets --------------------------------------------------------------

class PointSet:
    """An immutable subset of F_q^n stored as a bitset over point indices."""

    __slots__ = ("q", "n", "size", "bits", "_hash")

    def __init__(self, q: int, n: int, bits: int):
        size = check_space(q, n)
        if bits < 0 or bits >> size:
            raise DomainError("bitset has bits outside [0, q^n)")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "size", bits.bit_count())
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("PointSet is immutable")

    # constructors

    @classmethod
    def from_points(cls, q: int, n: int, points: Iterable[int]) -> "PointSet":
        bits = 0
        size = check_space(q, n)
        for p in points:
            if not 0 <= p < size:
                raise DomainError("point index %d outside [0, %d)" % (p, size))
            bits |= 1 << p
        return cls(q, n, bits)

    @classmethod
    def empty(cls, q: int, n: int) -> "PointSet":
        return cls(q, n, 0)

    @classmethod
    def full(cls, q: int, n: int) -> "PointSet":
        return cls(q, n, (1 << q**n) - 1)

    # protocol

    @property
    def ambient_size(self) -> int:
        return self.q**self.n

    @property
    def alpha(self) -> Fraction:
        """Exact density |S| / q^n."""
        return Fraction(self.size, self.ambient_size)

    def __contains__(self, idx: int) -> bool:
        return 0 <= idx < self.ambient_size and (self.bits >> idx) & 1 == 1

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        return (isinstance(other, PointSet) and self.q == other.q
                and self.n == other.n and self.bits == other.bits)

    def __hash__(self) -> int:
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.q, self.n, self.bits))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        if self.size <= 12:
            return "PointSet(q=%d, n=%d, {%s})" % (
                self.q, self.n, ", ".join(str(p) for p in self.points()))
        return "PointSet(q=%d, n=%d, size=%d)" % (self.q, self.n, self.size)

    def points(self) -> Iterator[int]:
        """Indices of member points in increasing order."""
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    # set algebra (all return new sets)

    def with_point(self, idx: int) -> "PointSet":
        return PointSet(self.q, self.n, self.bits | (1 << idx))

    def without_point(self, idx: int) -> "PointSet":
        return PointSet(self.q, self.n, self.bits & ~(1 << idx))

    def union(self, other: "PointSet") -> "PointSet":
        self._check_same_space(other)
        return PointSet(self.q, self.n, self.bits | other.bits)

    def intersection(self, other: "PointSet") -> "PointSet":
        self._check_same_space(other)
        return PointSet(self.q, self.n, self.bits & other.bits)

    def complement(self) -> "PointSet":
        return PointSet(self.q, self.n, ~self.bits & ((1 << self.ambient_size) - 1))

    def issubset(self, other: "PointSet") -> bool:
        self._check_same_space(other)
        return self.bits & ~other.bits == 0

    def translate(self, x: int) -> "PointSet":
        return PointSet.from_points(
            self.q, self.n, (point_add(p, x, self.q, self.n) for p in self.points()))

    def apply_linear(self, rows: Sequence[int]) -> "PointSet":
        """Image under the linear map sending e_i to the point rows[i]."""
        q, n = self.q, self.n
        out = set()
        for p in self.points():
            img = 0
            for i, d in enumerate(point_digits(p, q, n)):
                if d:
                    img = point_addmul(img, d, rows[i], q, n)
            out.add(img)
        return PointSet.from_points(q, n, out)

    def _check_same_space(self, other: "PointSet") -> None:
        if self.q != other.q or self.n != other.n:
            raise DomainError("point sets live in different spaces")

    # interop

    def to_numpy_mask(self) -> np.ndarray:
        """Membership as a uint8 array of length q^n (1 = member)."""
        size = self.ambient_size
        nbytes = (size + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[:size].copy()

    def to_json(self, compact: bool | None = None) -> dict:
        """JSON form; compact uses the bits_hex bitset encoding."""
        if compact is None:
            compact = self.ambient_size > 4096
        if compact:
            nbytes = (self.ambient_size + 7) // 8
            return {"q": self.q, "n": self.n,
                    "bits_hex": self.bits.to_bytes(nbytes, "little")[::-1].hex()}
        return {"q": self.q, "n": self.n, "points": list(self.points())}

    @classmethod
    def from_json(cls, obj: dict | str) -> "PointSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        q, n = int(obj["q"]), int(obj["n"])
        if "bits_hex" in obj:
            raw = bytes.fromhex(obj["bits_hex"])
            return cls(q, n, int.from_bytes(raw, "big"))
        return cls.from_points(q, n, (int(p) for p in obj["points"]))


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A t-dimensional subspace: RREF basis rows (as points) plus an offset.

    offset == 0 gives a linear subspace; otherwise an affine flat whose
    canonical offset has zeros in all pivot coordinates.
    """

    q: int
    n: int
    basis: tuple[int, ...]
    offset: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    def points(self) -> list[int]:
        """All q^dim points of the subspace."""
        q, n = self.q, self.n
        pts = [self.offset]
        for b in self.basis:
            step = [b]
            for _ in range(q - 2):
                step.append(point_add(step[-1], b, q, n))
            pts = [point_add(p, s, q, n) for s in [0] + step for p in pts]
        return pts

    def point_set(self) -> PointSet:
        return PointSet.from_points(self.q, self.n, self.points())

    def contains(self, idx: int) -> bool:
        q, n = self.q, self.n
        rel = point_sub(idx, self.offset, q, n)
        rows = [list(point_digits(b, q, n)) for b in self.basis]
        reduced, pivots = linalg.rref(rows, q)
        rem = linalg.reduce_against(point_digits(rel, q, n), reduced, pivots, q)
        return not any(rem)


def gaussian_binomial(n: int, t: int, q: int) -> int:
    """Number of t-dimensional linear subspaces of F_q^n."""
    if t < 0 or t > n:
        return 0
    num = den = 1
    for i in range(t):
        num *= q**(n - i) - 1
        den *= q**(t - i) - 1
    return num // den


def count_subspaces(q: int, n: int, t: int, kind: str = "linear") -> int:
    if kind == "linear":
        return gaussian_binomial(n, t, q)
    if kind == "affine":
        return q**(n - t) * gaussian_binomial(n, t, q)
    raise DomainError("kind must be 'linear' or 'affine', got %r" % kind)


def enumerate_subspaces(q: int, n: int, t: int, kind: str = "linear",
                        start: int = 0) -> Iterator[Subspace]:
    """Yield every t-dimensional subspace exactly once, in canonical order.

    Linear subspaces are emitted grouped by pivot-column set (lexicographic),
    free entries counting in base q; affine flats additionally iterate the
    q^(n-t) canonical offsets per direction space.  The stream is
    deterministic and restartable: start skips that many leading subspaces.
    """
    check_space(q, n)
    if t < 0 or t > n:
        raise DomainError("need 0 <= t <= n, got t=%d, n=%d" % (t, n))
    if kind not in ("linear", "affine"):
        raise DomainError("kind must be 'linear' or 'affine', got %r" % kind)
    n_offsets = q**(n - t) if kind == "affine" else 1
    skipped = 0
    for pivots in itertools.combinations(range(n), t):
        free_slots = [(i, j) for i in range(t) for j in range(n)
                      if j > pivots[i] and j not in pivots]
        block = q**len(free_slots) * n_offsets
        if skipped + block <= start:
            skipped += block
            continue
        free_cols = [j for j in range(n) if j not in pivots]
        for combo in itertools.product(range(q), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(t)]
            for i in range(t):
                rows[i][pivots[i]] = 1
            for (i, j), val in zip(free_slots, combo):
                rows[i][j] = val
            basis = tuple(digits_index(r, q) for r in rows)
            for off_combo in itertools.product(range(q), repeat=n - t) \
                    if kind == "affine" else [()]:
                if skipped < start:
                    skipped += 1
                    continue
                offset = 0
                if kind == "affine":
                    off_digits = [0] * n
                    for col, val in zip(free_cols, off_combo):
                        off_digits[col] = val
                    offset = digits_index(off_digits, q)
                yield Subspace(q, n, basis, offset)


# -- omega invariants --------------------------------------------------------

def _scalar_closed_candidates(s: PointSet) -> list[int]:
    """Nonzero v whose full scalar line {lam*v : lam != 0} lies in s."""
    q, n = s.q, s.n
    out = []
    for v in s.points():
        if v == 0:
            continue
        if q == 2 or all(point_scale(v, lam, q, n) in s for lam in range(2, q)):
            out.append(v)
    return out


def _omega_dfs(s: PointSet, stop_at: int | None) -> int:
    """Max dim of a linear subspace with all nonzero points in s.

    DFS over canonical basis chains: each new basis vector must be the
    minimum of the points it adds to the span, and chains are increasing,
    so every subspace inside s is visited exactly once.
    """
    q, n = s.q, s.n
    cands = _scalar_closed_candidates(s)
    best = 0
    if stop_at is not None and best >= stop_at:
        return best
    # span_pts maps point -> True for the current span, 0 included.
    def extend(span_pts: set[int], last: int, depth: int) -> bool:
        nonlocal best
        for v in cands:
            if v <= last or v in span_pts:
                continue
            new_pts = []
            ok = True
            for lam in range(1, q):
                lv = point_scale(v, lam, q, n)
                for w in span_pts:
                    p = point_add(lv, w, q, n)
                    if p not in s:
                        ok = False
                        break
                    new_pts.append(p)
                if not ok:
                    break
            if not ok or min(new_pts) != v:
                continue
            if depth + 1 > best:
                best = depth + 1
                if stop_at is not None and best >= stop_at:
                    return True
            if extend(span_pts | set(new_pts), v, depth + 1):
                return True
        return False

    extend({0}, -1, 0)
    return best


def omega_linear(s: PointSet) -> int:
    """Largest t with some linear t-space W satisfying W \\ {0} subset of s."""
    return _omega_dfs(s, None)


def has_linear_subspace(s: PointSet, t: int) -> bool:
    """Early-exit test for omega_linear(s) >= t."""
    if t <= 0:
        return True
    return _omega_dfs(s, t) >= t


def omega_affine(s: PointSet) -> int | None:
    """Largest t with some affine t-flat inside s; None for the empty set.

    The empty set gets a distinguished 'none' value rather than 0 because a
    single point already realizes dimension 0.
    """
    if s.size == 0:
        return None
    q, n = s.q, s.n
    best = 0
    for x in s.points():
        shifted = s.translate(point_neg(x, q, n))
        # a flat through x corresponds to a linear space inside s - x,
        # which contains 0, so the linear DFS applies directly
        best = max(best, _omega_dfs(shifted, None))
        if best == n:
            break
    return best


def direction_set(s: PointSet) -> PointSet:
    """Directions d for which some full line x, x+d, ..., x+(q-1)d lies in s.

    Contains 0 whenever s is nonempty, is invariant under translating s, and
    for q = 2 equals the sumset s + s.
    """
    q, n = s.q, s.n
    size = s.ambient_size
    bits = 0
    if q == 2:
        pts = list(s.points())
        for x in pts:
            for y in pts:
                bits |= 1 << (x ^ y)
        return PointSet(2, n, bits)
    if s.size:
        bits |= 1
    for d in range(1, size):
        for x in s.points():
            hit = True
            p = x
            for _ in range(q - 1):
                p = point_add(p, d, q, n)
                if p not in s:
                    hit = False
                    break
            if hit:
                bits |= 1 << d
                break
    return PointSet(q, n, bits)


def omega_arrow(s: PointSet) -> int:
    """omega_linear of the direction set."""
    return omega_linear(direction_set(s))


def product_sets(a: PointSet, b: PointSet) -> PointSet:
    """Cartesian product as a subset of F_q^(n_a + n_b), a-coordinates first."""
    if a.q != b.q:
        raise DomainError("product factors must share q")
    shift = a.ambient_size
    pts = [pa + pb * shift for pa in a.points() for pb in b.points()]
    return PointSet.from_points(a.q, a.n + b.n, pts)


# -- projectively determined sets --------------------------------------------

def line_through(v: int, q: int, n: int) -> list[int]:
    """Nonzero points of the 1-subspace spanned by v (v must be nonzero)."""
    if v == 0:
        raise DomainError("zero vector spans no line")
    return [point_scale(v, lam, q, n) for lam in range(1, q)]


def projective_points(q: int, n: int) -> list[int]:
    """Canonical representatives (minimum index) of all 1-subspaces."""
    size = check_space(q, n)
    seen = 0
    reps = []
    for v in range(1, size):
        if (seen >> v) & 1:
            continue
        reps.append(v)
        for w in line_through(v, q, n):
            seen |= 1 << w
    return reps


def is_projectively_determined(s: PointSet) -> bool:
    """True iff 0 is absent and s is closed under nonzero scalar scaling."""
    if 0 in s:
        return False
    if s.q == 2:
        return True
    return all(point_scale(v, lam, s.q, s.n) in s
               for v in s.points() for lam in range(2, s.q))


def projectivize(lines: Iterable[int | Subspace], q: int, n: int) -> PointSet:
    """Union of ell \\ {0} over the given 1-subspaces.

    Lines may be given as nonzero representative point indices or as
    dim-1 Subspace objects.
    """
    pts: set[int] = set()
    for ell in lines:
        if isinstance(ell, Subspace):
            if ell.dim != 1 or ell.offset != 0:
                raise DomainError("projectivize expects linear 1-subspaces")
            rep = ell.basis[0]
        else:
            rep = ell
        pts.update(line_through(rep, q, n))
    return PointSet.from_points(q, n, pts)

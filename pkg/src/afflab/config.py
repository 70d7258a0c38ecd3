"""Affine configurations B: ordered point lists with cached rank data.

A configuration caches an affine basis chosen greedily in stored point
order and, for every point b, the coefficient vector lam(b) expressing
b = x_0 + sum lam_i (x_i - x_0) over that basis.  Those coefficients drive
homomorphism counting: the affine maps B -> F_q^n correspond exactly to
choices of z = f(x_0) and u_i = f(x_i) - f(x_0).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

from . import linalg
from .errors import DomainError, InvariantViolation
from .space import (
    PointSet,
    check_space,
    digits_index,
    point_add,
    point_addmul,
    point_digits,
    point_sub,
)

MAX_CONFIG_POINTS = 64
MAX_CONFIG_DIM = 16


class AffineConfiguration:
    """An ordered, duplicate-free list of points of F_q^m."""

    __slots__ = ("q", "m", "points", "rank_aff", "rank_lin", "basis_idx", "coords")

    def __init__(self, q: int, m: int, points: Sequence[int]):
        check_space(q, m)
        if m > MAX_CONFIG_DIM:
            raise DomainError("configuration ambient dimension capped at %d" % MAX_CONFIG_DIM)
        if len(points) > MAX_CONFIG_POINTS:
            raise DomainError("configurations capped at %d points" % MAX_CONFIG_POINTS)
        pts = tuple(int(p) for p in points)
        if len(set(pts)) != len(pts):
            raise DomainError("configuration points must be distinct")
        size = q**m
        for p in pts:
            if not 0 <= p < size:
                raise DomainError("point index %d outside [0, %d)" % (p, size))
        self.q = q
        self.m = m
        self.points = pts
        if pts:
            self._build_basis()
        else:
            self.rank_aff = 0
            self.rank_lin = 0
            self.basis_idx = ()
            self.coords = ()

    def _build_basis(self) -> None:
        q, m = self.q, self.m
        x0 = self.points[0]
        basis_idx = [0]
        diff_rows: list[list[int]] = []
        reduced: list[list[int]] = []
        pivots: list[int] = []
        for i, b in enumerate(self.points[1:], start=1):
            diff = list(point_digits(point_sub(b, x0, q, m), q, m))
            rem = linalg.reduce_against(diff, reduced, pivots, q)
            if any(rem):
                basis_idx.append(i)
                diff_rows.append(diff)
                reduced, pivots = linalg.rref(diff_rows, q)
        self.basis_idx = tuple(basis_idx)
        self.rank_aff = len(basis_idx)
        self.rank_lin = linalg.rank(
            [point_digits(p, q, m) for p in self.points], q)
        coords = []
        for b in self.points:
            diff = point_digits(point_sub(b, x0, q, m), q, m)
            lam = linalg.solve_coordinates(diff_rows, diff, q)
            if lam is None:
                raise InvariantViolation("point %d not in the affine span of the basis" % b)
            coords.append(tuple(lam))
        self.coords = tuple(coords)

    # -- views -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AffineConfiguration) and self.q == other.q
                and self.m == other.m and self.points == other.points)

    def __hash__(self) -> int:
        return hash((self.q, self.m, self.points))

    def __repr__(self) -> str:
        return "AffineConfiguration(q=%d, m=%d, %d points, rank_aff=%d)" % (
            self.q, self.m, len(self.points), self.rank_aff)

    def affine_basis(self) -> list[int]:
        """The greedily selected affine basis points, in stored order."""
        if not self.points:
            raise DomainError("empty configuration has no affine basis")
        return [self.points[i] for i in self.basis_idx]

    def point_set(self) -> PointSet:
        return PointSet.from_points(self.q, self.m, self.points)

    def permuted(self, order: Sequence[int]) -> "AffineConfiguration":
        """Same configuration with points listed in a different order."""
        if sorted(order) != list(range(len(self.points))):
            raise DomainError("order must be a permutation of the point indices")
        return AffineConfiguration(self.q, self.m, [self.points[i] for i in order])

    def translated(self, x: int) -> "AffineConfiguration":
        return AffineConfiguration(
            self.q, self.m,
            [point_add(p, x, self.q, self.m) for p in self.points])

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"q": self.q, "m": self.m,
                "points": [list(point_digits(p, self.q, self.m)) for p in self.points]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "AffineConfiguration":
        if isinstance(obj, str):
            obj = json.loads(obj)
        q, m = int(obj["q"]), int(obj["m"])
        pts = [digits_index(d, q) for d in obj["points"]]
        return cls(q, m, pts)


def rank_affine(b: AffineConfiguration) -> int:
    """Size of a maximal affinely independent subset of b."""
    if not b.points:
        raise DomainError("affine rank of the empty configuration is undefined")
    return b.rank_aff


def affine_basis(b: AffineConfiguration) -> list[int]:
    return b.affine_basis()


# -- named constructors -------------------------------------------------------

def make_cube(q: int, t: int) -> AffineConfiguration:
    """The full cube F_q^t as a configuration on all q^t points."""
    if t < 0:
        raise DomainError("cube dimension must be nonnegative")
    check_space(q, t)
    return AffineConfiguration(q, t, range(q**t))


def make_circuit(k: int) -> AffineConfiguration:
    """The length-2k circuit over F_2: 0, e_1..e_{2k-2}, and their total sum.

    Its single nontrivial affine relation is the sum of all 2k points.
    """
    if k < 2:
        raise DomainError("circuits need k >= 2")
    m = 2 * k - 2
    pts = [0] + [1 << i for i in range(m)] + [(1 << m) - 1]
    return AffineConfiguration(2, m, pts)


@dataclass(frozen=True)
class ProductStructure:
    left: AffineConfiguration
    right: AffineConfiguration
    result: AffineConfiguration


def product(b1: AffineConfiguration, b2: AffineConfiguration) -> AffineConfiguration:
    """Product configuration on concatenated coordinates, pairs in lex order.

    The affine rank of the result must equal rank(b1) + rank(b2) - 1; this is
    recomputed from scratch and asserted rather than trusted.
    """
    if b1.q != b2.q:
        raise DomainError("product factors must share q")
    q = b1.q
    m = b1.m + b2.m
    if m > MAX_CONFIG_DIM:
        raise DomainError("product dimension %d exceeds the %d cap" % (m, MAX_CONFIG_DIM))
    shift = q**b1.m
    pts = [p1 + p2 * shift for p1 in b1.points for p2 in b2.points]
    result = AffineConfiguration(q, m, pts)
    if b1.points and b2.points:
        expected = b1.rank_aff + b2.rank_aff - 1
        if result.rank_aff != expected:
            raise InvariantViolation(
                "product rank %d != %d + %d - 1" % (result.rank_aff, b1.rank_aff, b2.rank_aff))
    return result


def product_structure(b1: AffineConfiguration, b2: AffineConfiguration) -> ProductStructure:
    return ProductStructure(b1, b2, product(b1, b2))


def power(b: AffineConfiguration, k: int) -> AffineConfiguration:
    """k-fold product of b with itself."""
    if k < 1:
        raise DomainError("power needs k >= 1")
    out = b
    for _ in range(k - 1):
        out = product(out, b)
    return out


# -- span evaluation ----------------------------------------------------------

def span_of(b: AffineConfiguration, z: int, u: Sequence[int], n: int) -> PointSet:
    """The set {z + sum lam_i(p) u_i : p in b} inside F_q^n.

    u supplies the images of the basis differences; the result has at most
    |b| points, with equality exactly when the induced map is injective on b.
    """
    q = b.q
    check_space(q, n)
    if len(u) != max(b.rank_aff - 1, 0):
        raise DomainError("need %d direction vectors, got %d" % (b.rank_aff - 1, len(u)))
    out = set()
    for lam in b.coords:
        p = z
        for li, ui in zip(lam, u):
            if li:
                p = point_addmul(p, li, ui, q, n)
        out.add(p)
    return PointSet.from_points(q, n, out)


# -- CLI-facing constructor specs ---------------------------------------------

def parse_config_spec(spec: str) -> AffineConfiguration:
    """Build a configuration from 'cube:q:t', 'circuit:k', or a JSON file path."""
    if spec.startswith("cube:"):
        try:
            _, qs, ts = spec.split(":")
            return make_cube(int(qs), int(ts))
        except ValueError as exc:
            raise DomainError("bad cube spec %r (want cube:q:t)" % spec) from exc
    if spec.startswith("circuit:"):
        try:
            _, ks = spec.split(":")
            return make_circuit(int(ks))
        except ValueError as exc:
            raise DomainError("bad circuit spec %r (want circuit:k)" % spec) from exc
    path = spec[1:] if spec.startswith("@") else spec
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return AffineConfiguration.from_json(json.load(fh))
    raise DomainError("unrecognized configuration spec %r" % spec)

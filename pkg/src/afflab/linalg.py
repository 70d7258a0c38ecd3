"""Dense linear algebra over the prime field Z/qZ on small digit-vector rows.

Rows are lists of residues in [0, q).  Everything here is exact integer
arithmetic; no floats enter at any point.
"""

from __future__ import annotations

from typing import Sequence


def inv_mod(a: int, q: int) -> int:
    """Multiplicative inverse of a nonzero residue modulo prime q."""
    a %= q
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 mod %d" % q)
    return pow(a, q - 2, q)


def rref(rows: Sequence[Sequence[int]], q: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over Z/qZ.

    Returns (nonzero reduced rows, pivot column per row).  Pivot entries are
    normalized to 1 and are the only nonzero entries in their column.
    """
    work = [list(r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: list[int] = []
    row_idx = 0
    for col in range(ncols):
        pivot = None
        for r in range(row_idx, len(work)):
            if work[r][col] % q != 0:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        inv = inv_mod(work[row_idx][col], q)
        work[row_idx] = [(x * inv) % q for x in work[row_idx]]
        for r in range(len(work)):
            if r != row_idx and work[r][col] % q != 0:
                factor = work[r][col] % q
                work[r] = [(a - factor * b) % q for a, b in zip(work[r], work[row_idx])]
        pivots.append(col)
        row_idx += 1
        if row_idx == len(work):
            break
    return work[:row_idx], pivots


def rank(rows: Sequence[Sequence[int]], q: int) -> int:
    """Rank over Z/qZ via Gaussian elimination."""
    reduced, _ = rref(rows, q)
    return len(reduced)


def in_rowspan(vec: Sequence[int], rows: Sequence[Sequence[int]], q: int) -> bool:
    """Whether vec lies in the row span of rows over Z/qZ."""
    return rank(list(rows) + [list(vec)], q) == rank(rows, q)


def reduce_against(vec: Sequence[int], reduced_rows: Sequence[Sequence[int]],
                   pivots: Sequence[int], q: int) -> list[int]:
    """Reduce vec against an already-reduced basis; zero iff vec in the span."""
    out = [x % q for x in vec]
    for row, col in zip(reduced_rows, pivots):
        factor = out[col]
        if factor:
            out = [(a - factor * b) % q for a, b in zip(out, row)]
    return out


def solve_coordinates(basis_rows: Sequence[Sequence[int]], vec: Sequence[int],
                      q: int) -> list[int] | None:
    """Coefficients c with sum c_i * basis_rows[i] = vec, or None if unsolvable.

    basis_rows need not be reduced but must be linearly independent.
    """
    k = len(basis_rows)
    if k == 0:
        return [] if all(x % q == 0 for x in vec) else None
    ncols = len(vec)
    # Augment each row with an indicator column to track the combination.
    aug = [list(r) + [1 if i == j else 0 for j in range(k)]
           for i, r in enumerate(basis_rows)]
    reduced, pivots = rref(aug, q)
    out = [x % q for x in vec]
    coeffs = [0] * k
    for row, col in zip(reduced, pivots):
        if col >= ncols:
            continue
        factor = out[col]
        if factor:
            out = [(a - factor * b) % q for a, b in zip(out, row[:ncols])]
            for j in range(k):
                coeffs[j] = (coeffs[j] + factor * row[ncols + j]) % q
    if any(x % q for x in out):
        return None
    return coeffs

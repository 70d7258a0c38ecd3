"""Pure NumPy / Python fallback implementations of the hot kernels.

Signatures mirror _kernels_numba exactly; both backends must agree
bit-for-bit on every input.  This path trades speed for having no JIT
dependency, selected via AFFLAB_KERNEL=numpy.
"""

from __future__ import annotations

import numpy as np

from . import linalg


def _digit_table(q: int, n: int) -> np.ndarray:
    """(N, n) array of base-q digits for every point index."""
    size = q**n
    idx = np.arange(size, dtype=np.int64)
    digs = np.empty((size, n), dtype=np.int64)
    for i in range(n):
        digs[:, i] = idx % q
        idx = idx // q
    return digs


def _indices_from_digits(digs: np.ndarray, q: int) -> np.ndarray:
    pows = q ** np.arange(digs.shape[-1], dtype=np.int64)
    return digs @ pows


def hom_pair_counts(lam: np.ndarray, q: int, n: int, host: np.ndarray) -> tuple[int, int]:
    """Count (z, u) pairs whose span lands in host; also the dependent-u part.

    lam is the (|B|, r-1) coefficient matrix of the configuration, host a
    uint8 membership array over the q^n points.  Returns (total, degenerate).
    """
    size = q**n
    npts, r1 = lam.shape
    host_b = host.astype(bool)
    if r1 == 0:
        return int(host_b.sum()), 0
    digs = _digit_table(q, n)
    total = 0
    degen = 0
    hostN = host_b
    # iterate u tuples with an odometer; z is vectorized per u
    u = np.zeros(r1, dtype=np.int64)
    lam_i = lam.astype(np.int64)
    while True:
        off_digs = (lam_i @ digs[u]) % q          # (|B|, n)
        span = (digs[:, None, :] + off_digs[None, :, :]) % q
        span_idx = _indices_from_digits(span, q)  # (N, |B|)
        count = int(hostN[span_idx].all(axis=1).sum())
        total += count
        if count and _u_dependent(u, q, n):
            degen += count
        elif count == 0 and _u_dependent(u, q, n):
            pass
        # odometer
        pos = 0
        while pos < r1:
            u[pos] += 1
            if u[pos] < size:
                break
            u[pos] = 0
            pos += 1
        if pos == r1:
            break
    return total, degen


def _u_dependent(u: np.ndarray, q: int, n: int) -> bool:
    rows = []
    for val in u:
        v = int(val)
        rows.append([(v // q**i) % q for i in range(n)])
    return linalg.rank(rows, q) < len(rows)


def build_span_masks(lam: np.ndarray, q: int, n: int) -> np.ndarray:
    """uint64 span bitmask for every (z, u), z fastest; needs q^n <= 64."""
    size = q**n
    if size > 64:
        raise ValueError("span masks need q^n <= 64")
    npts, r1 = lam.shape
    digs = _digit_table(q, n)
    lam_i = lam.astype(np.int64)
    n_u = size**r1
    out = np.zeros(n_u * size, dtype=np.uint64)
    u = np.zeros(r1, dtype=np.int64)
    pos_u = 0
    while True:
        off_digs = (lam_i @ digs[u]) % q if r1 else np.zeros((npts, n), dtype=np.int64)
        span = (digs[:, None, :] + off_digs[None, :, :]) % q
        span_idx = _indices_from_digits(span, q)
        masks = np.zeros(size, dtype=np.uint64)
        for j in range(npts):
            masks |= np.uint64(1) << span_idx[:, j].astype(np.uint64)
        out[pos_u * size:(pos_u + 1) * size] = masks
        pos_u += 1
        pos = 0
        while pos < r1:
            u[pos] += 1
            if u[pos] < size:
                break
            u[pos] = 0
            pos += 1
        if pos == r1 or r1 == 0:
            break
    return out


def counts_all_hosts(masks: np.ndarray, n_points: int) -> np.ndarray:
    """For every host bitmask A in [0, 2^n_points), count masks contained in A.

    Subset-sum dynamic programming over the host lattice: O(2^P * P).
    """
    n_hosts = 1 << n_points
    counts = np.bincount(masks.astype(np.int64), minlength=n_hosts).astype(np.int64)
    view = counts
    for b in range(n_points):
        shaped = view.reshape(-1, 2, 1 << b)
        shaped[:, 1, :] += shaped[:, 0, :]
    return counts


def free_set_search(n_points: int, point_ptr: np.ndarray, point_copies: np.ndarray,
                    copy_sizes: np.ndarray, mode: int, target: int, budget: int,
                    fix_first: bool, allowed_second: np.ndarray
                    ) -> tuple[int, np.ndarray, int, bool, bool]:
    """DFS for a maximum (or size->=target) subset completing no forbidden copy.

    mode 0 maximizes; mode 1 is decision(target) with early exit.  Returns
    (best, best_set, nodes, completed, found).  Symmetry restrictions: when
    fix_first, depth 0 admits only point 0 and depth 1 only points with
    allowed_second set.
    """
    need = copy_sizes.astype(np.int64).copy()
    cand = np.zeros(n_points + 2, dtype=np.int64)
    chosen = np.full(n_points + 1, -1, dtype=np.int64)
    best = 0
    best_set = np.empty(0, dtype=np.int64)
    nodes = 0
    found = False
    completed = True
    d = 0
    cand[0] = 0
    while d >= 0:
        p = int(cand[d])
        exhausted = p >= n_points
        if not exhausted:
            if mode == 0 and d + (n_points - p) <= best:
                exhausted = True
            elif mode == 1 and d + (n_points - p) < target:
                exhausted = True
        if exhausted:
            d -= 1
            if d >= 0:
                prev = int(chosen[d])
                for ci in range(point_ptr[prev], point_ptr[prev + 1]):
                    need[point_copies[ci]] += 1
                chosen[d] = -1
            continue
        cand[d] = p + 1
        if fix_first and d == 0 and p != 0:
            continue
        if fix_first and d == 1 and not allowed_second[p]:
            continue
        nodes += 1
        if nodes > budget:
            completed = False
            break
        ok = True
        for ci in range(point_ptr[p], point_ptr[p + 1]):
            if need[point_copies[ci]] == 1:
                ok = False
                break
        if not ok:
            continue
        chosen[d] = p
        for ci in range(point_ptr[p], point_ptr[p + 1]):
            need[point_copies[ci]] -= 1
        if d + 1 > best:
            best = d + 1
            best_set = chosen[:d + 1].copy()
            if mode == 1 and best >= target:
                found = True
                break
        d += 1
        cand[d] = p + 1
    return best, best_set, nodes, completed, found


def hom_total_gf2_bitset(lam_masks: np.ndarray, r1: int, n: int,
                         words: np.ndarray) -> tuple[int, int]:
    """GF(2) word-parallel hom count: intersect xor-shifted bitsets, popcount.

    lam_masks[j] packs the coefficient row of point j as bits over the r-1
    basis directions.  Must agree exactly with hom_pair_counts on q=2 input.
    """
    size = 1 << n
    n_words = max(1, size >> 6)
    total = 0
    degen = 0
    u = np.zeros(r1, dtype=np.int64)
    if r1 == 0:
        cnt = int(_popcount_words(words))
        return cnt, 0
    while True:
        offs = set()
        for j in range(lam_masks.shape[0]):
            m = int(lam_masks[j])
            off = 0
            for i in range(r1):
                if (m >> i) & 1:
                    off ^= int(u[i])
            offs.add(off)
        acc = words.copy()
        for off in offs:
            if off == 0:
                continue
            acc &= _xor_shift_words(words, off, n_words)
        cnt = int(_popcount_words(acc))
        total += cnt
        if cnt and _gf2_dependent(u):
            degen += cnt
        pos = 0
        while pos < r1:
            u[pos] += 1
            if u[pos] < size:
                break
            u[pos] = 0
            pos += 1
        if pos == r1:
            break
    return total, degen


_BUTTERFLY_MASKS = (
    np.uint64(0x5555555555555555), np.uint64(0x3333333333333333),
    np.uint64(0x0F0F0F0F0F0F0F0F), np.uint64(0x00FF00FF00FF00FF),
    np.uint64(0x0000FFFF0000FFFF), np.uint64(0x00000000FFFFFFFF),
)


def _xor_shift_words(words: np.ndarray, off: int, n_words: int) -> np.ndarray:
    """Bit permutation sending bit index p to p ^ off, word-level."""
    hi = off >> 6
    lo = off & 63
    if n_words > 1 and hi:
        idx = np.arange(n_words) ^ hi
        out = words[idx].copy()
    else:
        out = words.copy()
    for b in range(6):
        s = 1 << b
        if lo & s:
            m = _BUTTERFLY_MASKS[b]
            out = ((out & m) << np.uint64(s)) | ((out >> np.uint64(s)) & m)
    return out


def _popcount_words(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def _gf2_dependent(u: np.ndarray) -> bool:
    rows = [int(x) for x in u]
    rank = 0
    for _ in range(len(rows)):
        rows = [r for r in rows if r]
        if not rows:
            break
        piv = min(rows, key=lambda r: r & -r)
        low = piv & -piv
        rows = [(r ^ piv if r & low else r) for r in rows if r != piv]
        rank += 1
    return rank < len(u)

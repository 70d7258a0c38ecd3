"""Numba JIT implementations of the hot kernels.

Mirrors _kernels_numpy function for function; the two backends are required
to agree bit-for-bit (tested).  Import this module only when numba is
available; kernels.py handles selection.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, inline="always")
def _addmul_idx(a, lam, b, q, n):
    """a + lam*b on little-endian base-q encoded points."""
    out = 0
    mul = 1
    for _ in range(n):
        out += ((a + lam * b) % q) * mul
        a //= q
        b //= q
        mul *= q
    return out


@njit(cache=True)
def _u_dependent_modq(u, q, n, scratch):
    """Rank deficiency of the u-vectors as digit rows over Z/qZ."""
    r1 = u.shape[0]
    for i in range(r1):
        v = u[i]
        for j in range(n):
            scratch[i, j] = v % q
            v //= q
    rank = 0
    for col in range(n):
        pivot = -1
        for row in range(rank, r1):
            if scratch[row, col] % q != 0:
                pivot = row
                break
        if pivot < 0:
            continue
        for j in range(n):
            tmp = scratch[rank, j]
            scratch[rank, j] = scratch[pivot, j]
            scratch[pivot, j] = tmp
        # normalize pivot row to leading 1 via Fermat inverse
        lead = scratch[rank, col] % q
        inv = 1
        for _ in range(q - 2):
            inv = (inv * lead) % q
        for j in range(n):
            scratch[rank, j] = (scratch[rank, j] * inv) % q
        for row in range(r1):
            if row != rank and scratch[row, col] % q != 0:
                f = scratch[row, col] % q
                for j in range(n):
                    scratch[row, j] = (scratch[row, j] - f * scratch[rank, j]) % q
        rank += 1
        if rank == r1:
            break
    return rank < r1


@njit(cache=True)
def _u_dependent_gf2(u):
    """GF(2) dependence of index-encoded vectors via xor elimination."""
    r1 = u.shape[0]
    basis = np.zeros(r1, dtype=np.int64)
    nb = 0
    for i in range(r1):
        v = u[i]
        for j in range(nb):
            b = basis[j]
            hb = np.int64(1) << np.int64(63 - _clz(b))
            if v & hb:
                v ^= b
        if v == 0:
            return True
        basis[nb] = v
        nb += 1
        # keep basis sorted by leading bit descending (insertion)
        k = nb - 1
        while k > 0 and basis[k] > basis[k - 1]:
            tmp = basis[k]
            basis[k] = basis[k - 1]
            basis[k - 1] = tmp
            k -= 1
    return False


@njit(cache=True, inline="always")
def _clz(x):
    """Count leading zeros of a positive int64."""
    c = 0
    for b in range(63, -1, -1):
        if x & (np.int64(1) << np.int64(b)):
            return 63 - b
    return 64


@njit(cache=True)
def hom_pair_counts(lam, q, n, host):
    size = 1
    for _ in range(n):
        size *= q
    npts, r1 = lam.shape
    if r1 == 0:
        total0 = 0
        for z in range(size):
            if host[z]:
                total0 += 1
        return total0, 0
    u = np.zeros(r1, dtype=np.int64)
    off = np.zeros(npts, dtype=np.int64)
    scratch = np.zeros((r1, n), dtype=np.int64)
    total = 0
    degen = 0
    while True:
        for j in range(npts):
            o = 0
            for i in range(r1):
                li = lam[j, i]
                if li:
                    if q == 2:
                        o ^= u[i]
                    else:
                        o = _addmul_idx(o, li, u[i], q, n)
            off[j] = o
        cnt = 0
        if q == 2:
            for z in range(size):
                ok = True
                for j in range(npts):
                    if not host[z ^ off[j]]:
                        ok = False
                        break
                if ok:
                    cnt += 1
        else:
            for z in range(size):
                ok = True
                for j in range(npts):
                    if not host[_addmul_idx(z, 1, off[j], q, n)]:
                        ok = False
                        break
                if ok:
                    cnt += 1
        total += cnt
        if cnt:
            if q == 2:
                if _u_dependent_gf2(u):
                    degen += cnt
            else:
                if _u_dependent_modq(u, q, n, scratch):
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


@njit(cache=True)
def build_span_masks(lam, q, n):
    size = 1
    for _ in range(n):
        size *= q
    npts, r1 = lam.shape
    n_u = 1
    for _ in range(r1):
        n_u *= size
    out = np.zeros(n_u * size, dtype=np.uint64)
    u = np.zeros(r1, dtype=np.int64)
    off = np.zeros(npts, dtype=np.int64)
    pos_u = 0
    while True:
        for j in range(npts):
            o = 0
            for i in range(r1):
                li = lam[j, i]
                if li:
                    if q == 2:
                        o ^= u[i]
                    else:
                        o = _addmul_idx(o, li, u[i], q, n)
            off[j] = o
        base = pos_u * size
        for z in range(size):
            mask = np.uint64(0)
            for j in range(npts):
                if q == 2:
                    p = z ^ off[j]
                else:
                    p = _addmul_idx(z, 1, off[j], q, n)
                mask |= np.uint64(1) << np.uint64(p)
            out[base + z] = mask
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


@njit(cache=True)
def counts_all_hosts(masks, n_points):
    n_hosts = 1 << n_points
    counts = np.zeros(n_hosts, dtype=np.int64)
    for i in range(masks.shape[0]):
        counts[np.int64(masks[i])] += 1
    for b in range(n_points):
        bit = 1 << b
        for a in range(n_hosts):
            if a & bit:
                counts[a] += counts[a ^ bit]
    return counts


@njit(cache=True)
def free_set_search(n_points, point_ptr, point_copies, copy_sizes, mode,
                    target, budget, fix_first, allowed_second):
    need = copy_sizes.astype(np.int64)
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
        p = cand[d]
        exhausted = p >= n_points
        if not exhausted:
            if mode == 0 and d + (n_points - p) <= best:
                exhausted = True
            elif mode == 1 and d + (n_points - p) < target:
                exhausted = True
        if exhausted:
            d -= 1
            if d >= 0:
                prev = chosen[d]
                for ci in range(point_ptr[prev], point_ptr[prev + 1]):
                    need[point_copies[ci]] += 1
                chosen[d] = -1
            continue
        cand[d] = p + 1
        if fix_first and d == 0 and p != 0:
            continue
        if fix_first and d == 1 and allowed_second[p] == 0:
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


@njit(cache=True)
def _xor_shift_words(words, off, n_words, out):
    hi = off >> 6
    lo = np.uint64(off & 63)
    for w in range(n_words):
        out[w] = words[w ^ hi]
    for b in range(6):
        s = np.uint64(1 << b)
        if lo & s:
            if b == 0:
                m = np.uint64(0x5555555555555555)
            elif b == 1:
                m = np.uint64(0x3333333333333333)
            elif b == 2:
                m = np.uint64(0x0F0F0F0F0F0F0F0F)
            elif b == 3:
                m = np.uint64(0x00FF00FF00FF00FF)
            elif b == 4:
                m = np.uint64(0x0000FFFF0000FFFF)
            else:
                m = np.uint64(0x00000000FFFFFFFF)
            for w in range(n_words):
                x = out[w]
                out[w] = ((x & m) << s) | ((x >> s) & m)


@njit(cache=True)
def hom_total_gf2_bitset(lam_masks, r1, n, words):
    size = 1 << n
    n_words = max(1, size >> 6)
    npts = lam_masks.shape[0]
    if r1 == 0:
        cnt0 = np.uint64(0)
        for w in range(n_words):
            cnt0 += _popcount64(words[w])
        return int(cnt0), 0
    u = np.zeros(r1, dtype=np.int64)
    offs = np.zeros(npts, dtype=np.int64)
    acc = np.zeros(n_words, dtype=np.uint64)
    shifted = np.zeros(n_words, dtype=np.uint64)
    total = 0
    degen = 0
    while True:
        n_offs = 0
        for j in range(npts):
            m = lam_masks[j]
            off = 0
            for i in range(r1):
                if (m >> i) & 1:
                    off ^= u[i]
            dup = False
            for k in range(n_offs):
                if offs[k] == off:
                    dup = True
                    break
            if not dup:
                offs[n_offs] = off
                n_offs += 1
        for w in range(n_words):
            acc[w] = words[w]
        for k in range(n_offs):
            off = offs[k]
            if off == 0:
                continue
            _xor_shift_words(words, off, n_words, shifted)
            for w in range(n_words):
                acc[w] &= shifted[w]
        cnt = np.uint64(0)
        for w in range(n_words):
            cnt += _popcount64(acc[w])
        icnt = int(cnt)
        total += icnt
        if icnt and _u_dependent_gf2(u):
            degen += icnt
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

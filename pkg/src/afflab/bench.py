"""Benchmark the numba kernels against the numpy/Python fallback.

Run as `python -m afflab.bench [--repeat N]`.  Both backends must return
identical values; this script asserts that while timing them, so it doubles
as an end-to-end agreement check on realistic workloads.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import hom, kernels
from .config import make_cube
from .extremal import ExtremalQuery, ex_aff
from .space import PointSet


def _time(fn, repeat: int) -> tuple[float, object]:
    fn()  # warm-up (JIT compilation lands here for the numba side)
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _bench_case(name: str, make_call, repeat: int) -> dict:
    row = {"case": name}
    results = {}
    for backend in ("numba", "numpy") if kernels.HAS_NUMBA else ("numpy",):
        secs, out = _time(lambda b=backend: make_call(b), repeat)
        row[backend] = secs
        results[backend] = out
    if len(results) == 2 and results["numba"] != results["numpy"]:
        raise AssertionError("backend mismatch in %s: %r vs %r"
                             % (name, results["numba"], results["numpy"]))
    if "numba" in row and "numpy" in row:
        row["speedup"] = row["numpy"] / row["numba"] if row["numba"] > 0 else float("inf")
    return row


def run(repeat: int = 3) -> list[dict]:
    rng = np.random.Generator(np.random.Philox(key=1234))
    rows = []

    host27 = PointSet(3, 3, int.from_bytes(rng.bytes(4), "little") & ((1 << 27) - 1))
    line3 = make_cube(3, 1)
    rows.append(_bench_case(
        "hom exact  F_3^1 -> random A in F_3^3 (N^r = 729)",
        lambda b: hom.exact_pair_counts(line3, host27, backend=b), repeat))

    host128 = PointSet(2, 7, int.from_bytes(rng.bytes(16), "little"))
    sq = make_cube(2, 2)
    rows.append(_bench_case(
        "hom exact  F_2^2 -> random A in F_2^7 (N^r = 2^21)",
        lambda b: kernels.hom_pair_counts(hom.lam_matrix(sq), 2, 7,
                                          host128.to_numpy_mask(), backend=b),
        repeat))

    lam_masks = np.array([0, 1, 2, 3], dtype=np.int64)
    words = hom._host_words(host128)
    rows.append(_bench_case(
        "hom bitset F_2^2 -> same A, xor-shift word path",
        lambda b: kernels.hom_total_gf2_bitset(lam_masks, 2, 7, words, backend=b),
        repeat))

    lam16 = hom.lam_matrix(sq)
    rows.append(_bench_case(
        "sweep      hom(F_2^2, A) for all 65536 hosts in F_2^4",
        lambda b: int(kernels.counts_all_hosts(
            kernels.build_span_masks(lam16, 2, 4, backend=b), 16, backend=b).sum()),
        repeat))

    rows.append(_bench_case(
        "exaff      maximum cap in F_3^3 (symmetry-pruned DFS)",
        lambda b: ex_aff(ExtremalQuery(q=3, n=3, family=(line3,)),
                         backend=b).value, repeat))

    rows.append(_bench_case(
        "decision   no 10-cap in F_3^3 (no symmetry)",
        lambda b: ex_aff(ExtremalQuery(q=3, n=3, family=(line3,), mode="decision",
                                       k=10), symmetry=False, backend=b).value,
        repeat))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not kernels.HAS_NUMBA:
        print("numba unavailable; timing the numpy fallback only")
    rows = run(args.repeat)
    width = max(len(r["case"]) for r in rows)
    print("%-*s %12s %12s %9s" % (width, "case", "numba [s]", "numpy [s]", "speedup"))
    for r in rows:
        print("%-*s %12s %12s %9s" % (
            width, r["case"],
            "%.5f" % r["numba"] if "numba" in r else "-",
            "%.5f" % r["numpy"] if "numpy" in r else "-",
            "%.1fx" % r["speedup"] if "speedup" in r else "-"))


if __name__ == "__main__":
    main()

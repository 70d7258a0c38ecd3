import pytest

from afflab import bounds, oracle
from afflab.config import AffineConfiguration, make_cube, product
from afflab.errors import DomainError
from afflab.extremal import (
    ExtremalQuery,
    all_copies,
    check_bound_formulas,
    ex_aff,
    extract_subconfig,
)
from afflab.space import PointSet
from conftest import philox

F21 = make_cube(2, 1)
F31 = make_cube(3, 1)


def test_all_copies_line_counts():
    assert len(all_copies(F31, 2)) == 12    # affine lines of F_3^2
    assert len(all_copies(F31, 3)) == 117   # and of F_3^3
    assert len(all_copies(F21, 3)) == 28    # unordered pairs of F_2^3
    assert len(all_copies(make_cube(2, 2), 4)) == 140  # planes of F_2^4


def test_pairs_forbidden_gives_one():
    for n in (1, 2, 3, 4):
        rep = ex_aff(ExtremalQuery(q=2, n=n, family=(F21,)))
        assert rep.value == 1 and rep.status == "complete"


def test_cap_values_selected():
    for n, want in [(1, 2), (2, 4), (3, 9)]:
        rep = ex_aff(ExtremalQuery(q=3, n=n, family=(F31,)))
        assert rep.value == want
        assert oracle.oracle_free(F31, rep.witness)


def test_pruned_matches_unpruned():
    for q, n, fam in [(3, 2, (F31,)), (2, 3, (make_cube(2, 2),)),
                      (2, 3, (F21,))]:
        a = ex_aff(ExtremalQuery(q=q, n=n, family=fam), symmetry=True)
        b = ex_aff(ExtremalQuery(q=q, n=n, family=fam), symmetry=False)
        assert a.value == b.value


def test_decision_agrees_with_optimum():
    # decision(k) satisfiable iff k <= 4 at (q=3, n=2)
    for k in range(0, 7):
        rep = ex_aff(ExtremalQuery(q=3, n=2, family=(F31,), mode="decision", k=k))
        assert rep.detail["found"] == (k <= 4), k


def test_plane_free_exhaustive_cross_check():
    # independent brute force over all 2^9 subsets of F_3^2
    masks = all_copies(F31, 2)
    brute = max(m.bit_count() for m in range(1 << 9)
                if not any(c & m == c for c in masks))
    rep = ex_aff(ExtremalQuery(q=3, n=2, family=(F31,)))
    assert brute == rep.value == 4


def test_monotonicity_in_dimension():
    vals = {}
    for n in (1, 2, 3):
        vals[n] = ex_aff(ExtremalQuery(q=3, n=n, family=(F31,))).value
    for n in (1, 2):
        assert vals[n] <= vals[n + 1] <= 3 * vals[n]


def test_budget_gives_incomplete_lower_bound():
    rep = ex_aff(ExtremalQuery(q=3, n=3, family=(F31,), budget=50))
    assert rep.status == "incomplete"
    assert 0 <= rep.value <= 9
    assert oracle.oracle_free(F31, rep.witness)


def test_multi_member_family():
    # forbid both pairs and the full line: still pairs dominate for q=3
    rep = ex_aff(ExtremalQuery(q=3, n=2, family=(F31, make_cube(3, 2))))
    assert rep.value == 4


def test_family_validation():
    with pytest.raises(DomainError):
        ExtremalQuery(q=3, n=2, family=())
    with pytest.raises(DomainError):
        ExtremalQuery(q=3, n=2, family=(F21,))
    with pytest.raises(DomainError):
        ExtremalQuery(q=3, n=2, family=(F31,), mode="decision")


def test_check_bound_formulas():
    cmp2 = check_bound_formulas(3, 1, 2)
    assert cmp2.exact == 4 and cmp2.eq1_ok and cmp2.thm42_ok
    assert cmp2.thm42_rhs == pytest.approx(8.2653, abs=1e-3)
    cmp3 = check_bound_formulas(3, 1, 3)
    assert cmp3.exact == 9 and cmp3.thm42_ok
    assert cmp3.thm42_rhs == pytest.approx(22.7718, abs=1e-3)
    for n in range(1, 11):
        c = check_bound_formulas(2, 1, n, exact=1)
        assert c.eq1_ok and c.thm42_ok


# -- extraction ---------------------------------------------------------------

def test_extract_plane_host():
    plane = PointSet.from_points(2, 3, [0, 1, 2, 3])
    res = extract_subconfig(F21, plane)
    # all 12 non-degenerate maps split evenly: |S_u| = 4 for in-plane u,
    # and each coordinate-complement translate holds exactly 2 of them
    assert res.s_size == 2
    assert res.extracted.size == 2 and res.extracted.n == 2
    assert res.complement_space.dim == 2


def test_extract_rank_one_returns_host():
    single = AffineConfiguration(2, 3, [5])
    a = PointSet.from_points(2, 3, [0, 2, 6])
    res = extract_subconfig(single, a)
    assert res.u == () and res.j == 0
    assert res.extracted == a


def test_extract_requires_nondegenerate_hom():
    with pytest.raises(DomainError):
        extract_subconfig(F31, PointSet.from_points(3, 2, [0, 1, 3, 4]).intersection(
            PointSet.from_points(3, 2, [0])))


def test_extract_pigeonhole_guarantee(rng):
    from fractions import Fraction

    for _ in range(50):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 4 if q == 2 else 3))
        b = make_cube(q, 1)
        a = PointSet(q, n, int.from_bytes(rng.bytes(16), "little")
                     & ((1 << q**n) - 1))
        if a.size < 2:
            continue
        nondeg = (a.size**2 - a.size) if q == 2 else None
        from afflab.hom import hom_count
        rep = hom_count(b, a, with_aut=False)
        if rep.total - rep.degenerate == 0:
            continue
        res = extract_subconfig(b, a)
        size = q**n
        lower = Fraction(rep.total - rep.degenerate, q * size)
        assert res.s_size >= lower


def test_freeness_transfer():
    # A (B x F)-free implies the extraction is F-free: B = F = F_2^1, so the
    # product is the 4-point plane configuration and "F-free" means <= 1 point
    rng = philox(606)
    plane_cfg = product(F21, F21)
    found = 0
    while found < 500:
        bits = int(rng.integers(0, 1 << 8))
        a = PointSet(2, 3, bits)
        if a.size < 2:
            continue
        if not oracle.oracle_free(plane_cfg, a):
            continue
        res = extract_subconfig(F21, a)
        assert res.extracted.size <= 1  # F_2^1-free
        found += 1


def test_every_computed_value_below_bounds():
    pairs = [(3, 1, 1, 2), (3, 1, 2, 4), (3, 1, 3, 9), (2, 1, 3, 1)]
    for q, t, n, exact in pairs:
        rhs = bounds.eval_bound("thm42_rhs", {"q": q, "n": n, "t": t})
        assert exact < float(rhs) - rhs.tolerance
        rhs1 = bounds.eval_bound("eq1_rhs", {"q": q, "n": n, "t": t})
        assert exact < float(rhs1) - rhs1.tolerance

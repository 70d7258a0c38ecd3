import pytest

from afflab import hom, kernels, oracle
from afflab.config import AffineConfiguration, make_circuit, make_cube
from afflab.errors import BudgetError
from afflab.space import PointSet
from conftest import philox, random_config, random_pointset


def test_full_host_gives_n_to_the_r():
    for b, q, n in [(make_cube(2, 1), 2, 3), (make_cube(2, 2), 2, 3),
                    (make_cube(3, 1), 3, 2), (make_circuit(3), 2, 4)]:
        rep = hom.hom_count(b, PointSet.full(q, n), with_aut=False)
        assert rep.total == (q**n)**b.rank_aff


def test_line_host_identity_exhaustive():
    line = make_cube(2, 1)
    for mask in range(16):
        a = PointSet(2, 2, mask)
        rep = hom.hom_count(line, a, with_aut=False)
        assert rep.total == a.size**2
        assert rep.degenerate == a.size  # the constant maps


def test_f31_small_host():
    rep = hom.hom_count(make_cube(3, 1), PointSet.from_points(3, 1, [0, 1]))
    assert (rep.total, rep.degenerate, rep.nondegenerate) == (2, 2, 0)
    assert rep.copies == 0


def test_rank_one_configuration():
    b = AffineConfiguration(2, 2, [3])
    a = PointSet.from_points(2, 3, [0, 2, 5])
    rep = hom.hom_count(b, a)
    assert rep.total == a.size and rep.degenerate == 0
    assert rep.copies == a.size  # single points


def test_square_self_counts():
    b = make_cube(2, 2)
    rep = hom.hom_count(b, PointSet.full(2, 2))
    assert rep.total == 64 and rep.degenerate == 40 and rep.nondegenerate == 24
    assert rep.aut_order == 24 and rep.copies == 1


def test_empty_configuration_convention():
    rep = hom.hom_count(AffineConfiguration(2, 2, []), PointSet.full(2, 2))
    assert rep.total == 1 and rep.nondegenerate == 1 and rep.copies == 1


def test_aut_orders():
    assert hom.aut_order(make_cube(2, 1)) == 2
    assert hom.aut_order(make_cube(2, 2)) == 24
    assert hom.aut_order(make_cube(3, 1)) == 6   # q^t * |GL(1,3)| * ... = 3*2
    assert hom.aut_order(make_circuit(3)) == 720


def test_aut_c6_by_permutation_brute_force():
    # every bijection of the 6 points must preserve the one affine relation
    # (the sum of all six points vanishes), which is symmetric, so all 720
    # permutations are automorphisms
    import itertools

    c6 = make_circuit(3)
    pts = list(c6.points)
    count = 0
    for perm in itertools.permutations(pts):
        img = dict(zip(pts, perm))
        acc = 0
        for p in pts:
            acc ^= img[p]
        if acc == 0:  # the unique relation maps to a relation
            count += 1
    assert count == 720 == hom.aut_order(c6)


def test_copy_counts_pairs():
    line = make_cube(2, 1)
    for n in (1, 2, 3):
        for mask in range(0, 1 << 2**n, 7):
            a = PointSet(2, n, mask)
            assert hom.copy_count(line, a) == a.size * (a.size - 1) // 2


def test_copy_count_self_is_one():
    for b in (make_cube(2, 2), make_circuit(3), make_cube(3, 1)):
        assert hom.copy_count(b, b.point_set()) == 1


def test_contains_copy():
    line3 = make_cube(3, 1)
    assert hom.contains_copy(line3, PointSet.from_points(3, 1, [0, 1, 2]))
    assert not hom.contains_copy(line3, PointSet.from_points(3, 1, [0, 1]))
    assert hom.contains_copy(make_cube(2, 1), PointSet.from_points(2, 3, [2, 7]))


def test_copies_times_aut_equals_nondegenerate(rng):
    for _ in range(100):
        q = int(rng.choice([2, 3]))
        b = random_config(rng, q, int(rng.integers(1, 3)), 4)
        a = random_pointset(rng, q, int(rng.integers(1, 4 if q == 2 else 3)))
        rep = hom.hom_count(b, a)
        assert rep.copies * rep.aut_order == rep.nondegenerate
        assert rep.total == rep.degenerate + rep.nondegenerate


def test_invariance_under_host_transforms():
    # exhaustive over every host of F_2^3, all 8 translations plus a linear map
    rng = philox(404)
    line = make_cube(2, 1)
    square = make_cube(2, 2)
    for b in (line, square):
        for mask in range(256):
            a = PointSet(2, 3, mask)
            base = hom.exact_pair_counts(b, a)
            for x in range(1, 8):
                assert hom.exact_pair_counts(b, a.translate(x)) == base
            img = a.apply_linear([3, 2, 5])  # rows span F_2^3
            assert hom.exact_pair_counts(b, img)[0] == base[0]
    for _ in range(40):
        a = random_pointset(rng, 3, 2)
        base = hom.hom_count(make_cube(3, 1), a, with_aut=False).total
        assert hom.hom_count(make_cube(3, 1), a.translate(4), with_aut=False).total == base
        img = a.apply_linear([4, 3])
        assert hom.hom_count(make_cube(3, 1), img, with_aut=False).total == base


def test_invariance_under_configuration_rebasing(rng):
    for _ in range(60):
        q = int(rng.choice([2, 3]))
        b = random_config(rng, q, int(rng.integers(1, 3)), 5)
        a = random_pointset(rng, q, 2)
        base = hom.hom_count(b, a, with_aut=False).total
        order = list(rng.permutation(len(b.points)))
        permuted = b.permuted([int(i) for i in order])
        assert hom.hom_count(permuted, a, with_aut=False).total == base
        translated = b.translated(int(rng.integers(q**b.m)))
        assert hom.hom_count(translated, a, with_aut=False).total == base


def test_budget_error_names_requirement():
    b = make_cube(2, 4)
    a = PointSet.full(2, 4)
    with pytest.raises(BudgetError, match=r"N\^r"):
        hom.hom_count(b, a, budget=100)


def test_monte_carlo_within_five_stderr():
    rng = philox(2024)
    line = make_cube(2, 1)
    square = make_cube(2, 2)
    failures = 0
    for trial in range(100):
        q = int(rng.choice([2, 3]))
        b = square if (q == 2 and trial % 3 == 0) else make_cube(q, 1)
        n = int(rng.integers(1, 4 if q == 2 else 3))
        a = random_pointset(rng, q, n)
        exact = hom.hom_count(b, a, with_aut=False).total
        rep = hom.hom_count(b, a, mode="monte_carlo", samples=4000,
                            seed=trial, with_aut=False)
        stderr = rep.method["stderr"]
        if stderr == 0:
            assert rep.total == exact
        elif abs(rep.total - exact) > 5 * stderr:
            failures += 1
    assert failures == 0


def test_monte_carlo_is_seed_deterministic():
    a = PointSet.from_points(2, 3, [0, 1, 2, 4])
    r1 = hom.hom_count(make_cube(2, 2), a, mode="monte_carlo", samples=1000, seed=9)
    r2 = hom.hom_count(make_cube(2, 2), a, mode="monte_carlo", samples=1000, seed=9)
    assert r1.total == r2.total and r1.method["hits"] == r2.method["hits"]


def test_bitset_path_agrees_with_generic():
    rng = philox(500)
    cases = [(make_cube(2, 1), 7), (make_cube(2, 1), 8),
             (make_cube(2, 2), 7), (make_cube(2, 2), 8),
             (make_circuit(2), 7)]
    for b, n in cases:
        a = random_pointset(rng, 2, n)
        fast = hom.exact_pair_counts(b, a)  # auto-selects the bitset path
        lam = hom.lam_matrix(b)
        generic = kernels.hom_pair_counts(lam, 2, n, a.to_numpy_mask())
        assert fast == generic


def test_oracle_agreement_sample(rng):
    for _ in range(100):
        q = int(rng.choice([2, 3]))
        b = random_config(rng, q, int(rng.integers(1, 3)), 4)
        a = random_pointset(rng, q, int(rng.integers(1, 4 if q == 2 else 3)),
                            nonempty=False)
        assert hom.hom_count(b, a, with_aut=False).total == \
            oracle.oracle_hom_count(b, a).value

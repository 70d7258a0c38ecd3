import pytest

from afflab.errors import DomainError
from afflab.oracle import oracle_direction_set, oracle_omega, oracle_sumset
from afflab.space import (
    PointSet,
    count_subspaces,
    digits_index,
    direction_set,
    enumerate_subspaces,
    gaussian_binomial,
    is_projectively_determined,
    line_through,
    omega_affine,
    omega_arrow,
    omega_linear,
    point_add,
    point_digits,
    point_scale,
    product_sets,
    projective_points,
    projectivize,
)
from conftest import philox, random_pointset


def test_encode_decode_round_trip():
    for q, n in [(2, 5), (3, 3), (5, 2), (13, 1)]:
        for idx in range(q**n):
            assert digits_index(point_digits(idx, q, n), q) == idx


def test_point_arithmetic_matches_digitwise():
    q, n = 3, 2
    for a in range(9):
        for b in range(9):
            da, db = point_digits(a, q, n), point_digits(b, q, n)
            expect = digits_index([(x + y) % q for x, y in zip(da, db)], q)
            assert point_add(a, b, q, n) == expect
    assert point_scale(4, 2, 3, 2) == digits_index([2, 2], 3)


def test_field_validation():
    with pytest.raises(DomainError):
        PointSet.empty(4, 2)
    with pytest.raises(DomainError):
        PointSet.empty(17, 1)


# -- subspace enumeration ------------------------------------------------------

def test_linear_counts_match_gaussian_binomials():
    for q in (2, 3, 5):
        for n in range(0, 6):
            for t in range(0, n + 1):
                count = sum(1 for _ in enumerate_subspaces(q, n, t, "linear"))
                assert count == gaussian_binomial(n, t, q), (q, n, t)


def test_affine_counts():
    for q, n, t in [(2, 3, 1), (2, 4, 2), (3, 2, 1), (3, 3, 2), (5, 2, 1)]:
        count = sum(1 for _ in enumerate_subspaces(q, n, t, "affine"))
        assert count == q**(n - t) * gaussian_binomial(n, t, q)
        assert count == count_subspaces(q, n, t, "affine")


def test_enumeration_is_duplicate_free_and_well_formed():
    for q, n, t, kind in [(2, 4, 2, "linear"), (3, 2, 1, "affine"), (2, 3, 2, "affine")]:
        seen = set()
        for sub in enumerate_subspaces(q, n, t, kind):
            pts = frozenset(sub.points())
            assert len(pts) == q**t
            assert pts not in seen
            seen.add(pts)
            if kind == "linear":
                assert 0 in pts


def test_spec_counts():
    assert sum(1 for _ in enumerate_subspaces(2, 3, 1, "linear")) == 7
    zero = list(enumerate_subspaces(2, 4, 0, "linear"))
    assert len(zero) == 1 and zero[0].points() == [0]
    assert sum(1 for _ in enumerate_subspaces(3, 2, 1, "affine")) == 12


def test_enumeration_restartable():
    full = list(enumerate_subspaces(2, 4, 2, "linear"))
    for start in (0, 1, 7, 20, len(full)):
        tail = list(enumerate_subspaces(2, 4, 2, "linear", start=start))
        assert tail == full[start:]


def test_bad_dimension_rejected():
    with pytest.raises(DomainError):
        list(enumerate_subspaces(2, 2, 3, "linear"))
    with pytest.raises(DomainError):
        list(enumerate_subspaces(2, 2, 1, "projective"))


def test_subspace_contains():
    sub = next(enumerate_subspaces(3, 2, 1, "affine", start=3))
    pts = set(sub.points())
    for p in range(9):
        assert sub.contains(p) == (p in pts)


# -- omega invariants -----------------------------------------------------------

def test_omega_linear_examples():
    assert omega_linear(PointSet.full(2, 3).without_point(0)) == 3
    # coset of a hyperplane not containing 0: x + y falls outside the coset
    coset = PointSet.from_points(2, 3, [1, 3, 5, 7])
    assert 0 not in coset
    assert omega_linear(coset) == 1
    assert omega_linear(PointSet.empty(2, 3)) == 0


def test_omega_affine_examples():
    assert omega_affine(PointSet.from_points(3, 2, [4])) == 0
    assert omega_affine(PointSet.from_points(3, 1, [0, 1, 2])) == 1
    assert omega_affine(PointSet.from_points(3, 1, [0, 1])) == 0
    assert omega_affine(PointSet.empty(3, 1)) is None


def test_direction_set_examples():
    assert direction_set(PointSet.full(3, 1)) == PointSet.full(3, 1)
    assert direction_set(PointSet.from_points(3, 1, [0, 1])) == \
        PointSet.from_points(3, 1, [0])
    c6 = PointSet.from_points(2, 4, [0, 1, 2, 4, 8, 15])
    assert direction_set(c6) == PointSet.full(2, 4)
    assert omega_arrow(c6) == 4
    assert omega_arrow(PointSet.from_points(3, 1, [0, 1])) == 0


def test_omega_arrow_of_flat():
    flat = PointSet.from_points(3, 2, [0, 1, 2])  # the t=1 cube embedded
    assert omega_arrow(flat) == 1
    assert omega_arrow(PointSet.full(2, 3)) == 3


def test_omega_chain_inequality_random():
    # omega <= omega_aff needs 0 in S (see the counterexample test below);
    # omega_aff <= omega_arrow holds for every nonempty S
    rng = philox(11)
    for _ in range(1000):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 5 if q == 2 else 4))
        s = random_pointset(rng, q, n, nonempty=True)
        assert omega_affine(s) <= omega_arrow(s), (q, n, sorted(s.points()))
        s0 = s.with_point(0)
        assert omega_linear(s0) <= omega_affine(s0) <= omega_arrow(s0), \
            (q, n, sorted(s0.points()))


def test_omega_chain_fails_without_zero():
    # a single nonzero point over F_2: the punctured line span{x} \ {0} lies
    # inside S, so omega = 1, yet no 1-flat fits and the direction set is {0}
    s = PointSet.from_points(2, 3, [6])
    assert omega_linear(s) == 1
    assert oracle_omega(s, "linear") == 1
    assert omega_affine(s) == 0
    assert omega_arrow(s) == 0


def test_direction_set_translation_invariance_exhaustive():
    for q, n in [(2, 2), (2, 3), (3, 1), (3, 2)]:
        size = q**n
        for bits in range(1 << size):
            s = PointSet(q, n, bits)
            d = direction_set(s)
            for x in range(size):
                assert direction_set(s.translate(x)) == d


def test_direction_set_equals_sumset_for_q2():
    rng = philox(12)
    for _ in range(300):
        n = int(rng.integers(1, 5))
        s = random_pointset(rng, 2, n, nonempty=False)
        assert direction_set(s) == oracle_sumset(s)


def test_direction_set_matches_oracle_q3():
    rng = philox(13)
    for _ in range(100):
        n = int(rng.integers(1, 3))
        s = random_pointset(rng, 3, n, nonempty=False)
        assert direction_set(s) == oracle_direction_set(s)


def test_omega_against_oracle_exhaustive_small():
    for bits in range(1 << 8):
        s = PointSet(2, 3, bits)
        assert omega_linear(s) == oracle_omega(s, "linear")
        assert omega_affine(s) == oracle_omega(s, "affine")


# -- projectively determined sets ------------------------------------------------

def test_projectively_determined():
    assert is_projectively_determined(PointSet.full(2, 3).without_point(0))
    assert not is_projectively_determined(PointSet.from_points(3, 1, [1]))
    assert is_projectively_determined(PointSet.from_points(3, 1, [1, 2]))
    assert not is_projectively_determined(PointSet.from_points(2, 2, [0, 1]))


def test_projectivize_expands_lines():
    ps = projectivize([1, 3], 3, 2)  # spans of e1 and e2
    assert sorted(ps.points()) == [1, 2, 3, 6]
    assert is_projectively_determined(ps)
    rebuilt = projectivize(projective_points(3, 2), 3, 2)
    assert rebuilt == PointSet.full(3, 2).without_point(0)


def test_projective_point_count():
    for q, n in [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2)]:
        assert len(projective_points(q, n)) == (q**n - 1) // (q - 1)
        for rep in projective_points(q, n):
            assert rep == min(line_through(rep, q, n))


# -- point sets -------------------------------------------------------------------

def test_pointset_json_round_trip():
    s = PointSet.from_points(3, 2, [0, 4, 8])
    assert PointSet.from_json(s.to_json(compact=False)) == s
    assert PointSet.from_json(s.to_json(compact=True)) == s
    compact = s.to_json(compact=True)
    assert set(compact) == {"q", "n", "bits_hex"}
    assert compact["bits_hex"] == compact["bits_hex"].lower()
    # least-significant bit is point 0
    assert int(compact["bits_hex"], 16) & 1 == 1


def test_pointset_alpha_is_exact():
    s = PointSet.from_points(3, 2, [0, 1, 2])
    assert s.alpha.numerator == 1 and s.alpha.denominator == 3


def test_pointset_set_algebra():
    a = PointSet.from_points(2, 2, [0, 1])
    b = PointSet.from_points(2, 2, [1, 2])
    assert sorted(a.union(b).points()) == [0, 1, 2]
    assert sorted(a.intersection(b).points()) == [1]
    assert sorted(a.complement().points()) == [2, 3]
    assert a.issubset(a.union(b))
    assert a.translate(3) == PointSet.from_points(2, 2, [3, 2])


def test_product_sets_shape():
    a = PointSet.from_points(2, 1, [0, 1])
    b = PointSet.from_points(2, 2, [0, 3])
    ab = product_sets(a, b)
    assert ab.n == 3 and ab.size == 4
    pairs = {(pa, pb) for pa in a.points() for pb in b.points()}
    got = set()
    for p in ab.points():
        digs = point_digits(p, 2, 3)
        got.add((digits_index(digs[:1], 2), digits_index(digs[1:], 2)))
    assert got == pairs


def test_mask_array_matches_bits(rng):
    s = random_pointset(rng, 3, 2)
    mask = s.to_numpy_mask()
    assert mask.shape == (9,)
    for p in range(9):
        assert bool(mask[p]) == (p in s)

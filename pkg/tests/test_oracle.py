import pytest

from afflab import oracle
from afflab.config import make_circuit, make_cube
from afflab.errors import BudgetError
from afflab.space import PointSet


def test_oracle_hom_full_square():
    rep = oracle.oracle_hom_count(make_cube(2, 2), PointSet.full(2, 2))
    assert rep.value == 64


def test_oracle_hom_c6_self_nondegenerate_part():
    c6 = make_circuit(3)
    total = oracle.oracle_hom_count(c6, c6.point_set()).value
    from afflab.hom import degenerate_hom_count
    assert total - degenerate_hom_count(c6, c6.point_set()) == 720


def test_oracle_omega_examples():
    assert oracle.oracle_omega(PointSet.full(2, 3).without_point(0), "linear") == 3
    assert oracle.oracle_omega(PointSet.empty(2, 2), "affine") is None
    assert oracle.oracle_omega(PointSet.from_points(3, 2, [4]), "affine") == 0


def test_oracle_free_examples():
    cap4 = PointSet.from_points(3, 2, [0, 1, 3, 4])
    assert oracle.oracle_free(make_cube(3, 1), cap4)
    assert not oracle.oracle_free(make_cube(2, 1), PointSet.from_points(2, 2, [0, 3]))
    # a full line is found
    assert not oracle.oracle_free(make_cube(3, 1), PointSet.from_points(3, 2, [0, 1, 2]))


def test_oracle_size_guard():
    with pytest.raises(BudgetError):
        oracle.oracle_hom_count(make_cube(2, 4), PointSet.full(2, 6))


def test_oracle_reports_are_deterministic():
    a = PointSet.from_points(2, 2, [0, 1, 3])
    r1 = oracle.oracle_hom_count(make_cube(2, 1), a)
    r2 = oracle.oracle_hom_count(make_cube(2, 1), a)
    assert r1.value == r2.value
    assert r1.instance_digest == r2.instance_digest


def test_oracle_relation_generation_nontrivial():
    c6 = make_circuit(3)
    rels = oracle._affine_relations(c6)
    # C_6 has dependent points (the all-ones sum), so at least one relation
    assert any(len(r) >= 3 for r in rels)
    for rel in rels:
        q = 2
        assert sum(c for _, c in rel) % q == 0  # affine: coefficients sum to 0

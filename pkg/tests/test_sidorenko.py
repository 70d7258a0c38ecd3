import math
import warnings
from fractions import Fraction

import mpmath
import pytest

from afflab import hom, sidorenko as sid
from afflab.config import AffineConfiguration, make_circuit, make_cube
from afflab.errors import DomainError
from afflab.space import PointSet
from conftest import random_pointset

F21 = make_cube(2, 1)
F22 = make_cube(2, 2)
F31 = make_cube(3, 1)


def test_margin_full_and_empty_hosts_are_zero():
    for c in (2, 3.5, 13.901):
        assert sid.margin(F21, PointSet.full(2, 3), c) == 0
        assert sid.margin(F21, PointSet.empty(2, 3), c) == 0


def test_margin_identity_for_line_exhaustive():
    for mask in range(16):
        assert sid.margin(F21, PointSet(2, 2, mask), 2) == 0


def test_margin_f31_at_sigma3():
    a = PointSet.from_points(3, 1, [0, 1])
    got = sid.margin(F31, a, 13.901)
    # independent high-precision evaluation of 2 - (2/3)^13.901 * 9
    with mpmath.workdps(50):
        expect = 2 - mpmath.power(mpmath.mpf(2) / 3, mpmath.mpf("13.901")) * 9
    assert abs(got - float(expect)) < 1e-9 * 9  # documented tolerance vs N^r


def test_margin_exact_rational_for_integer_c():
    a = PointSet.from_points(3, 1, [0, 1])
    m = sid.margin(F31, a, 2)
    assert isinstance(m, Fraction) and m == -2


def test_required_c_line_is_two():
    for mask in range(1, 15):
        a = PointSet(2, 2, mask)
        if 0 < a.size < 4:
            assert abs(sid.required_C(F21, a) - 2.0) < 1e-12


def test_required_c_closed_forms():
    a = PointSet.from_points(3, 1, [0, 1])
    assert abs(sid.required_C(F31, a) - math.log(2 / 9) / math.log(2 / 3)) < 1e-12
    cap = PointSet.from_points(3, 2, [0, 1, 3, 4])
    # caps are line-free, so only the 4 constant maps survive
    assert hom.hom_count(F31, cap, with_aut=False).total == 4
    assert abs(sid.required_C(F31, cap) - math.log(4 / 81) / math.log(4 / 9)) < 1e-12
    assert sid.required_C(F31, cap) > 2


def test_required_c_degenerate_densities():
    assert sid.required_C(F21, PointSet.empty(2, 2)) == 0.0
    assert sid.required_C(F21, PointSet.full(2, 2)) == 0.0


def test_verify_line_c2():
    for n in (1, 2, 3):
        v = sid.verify_exhaustive(F21, 2, n)
        assert v.status == "verified"
        assert v.subsets_examined == 1 << 2**n


def test_verify_square_c4_embodies_lemma():
    assert sid.verify_exhaustive(F22, 4, 3).status == "verified"


def test_verify_c6_circuit_at_its_size():
    # the 6-circuit at C = |B| = 6, exhaustively over all hosts of F_2^4
    v = sid.verify_exhaustive(make_circuit(3), 6, 4)
    assert v.status == "verified" and v.subsets_examined == 65536


def test_verify_f31_counterexample():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        v = sid.verify_exhaustive(F31, 2, 1)
    assert v.status == "counterexample"
    assert sorted(v.witness.points()) == [0, 1]
    assert v.margin == Fraction(-2)
    assert abs(v.required_C - 3.7095112913514545) < 1e-10
    # the worst margin is shared by all three 2-point sets; {0,1} is lex-least
    assert sid.margin(F31, PointSet.from_points(3, 1, [0, 2]), 2) == -2


def test_verify_warns_below_configuration_size():
    with pytest.warns(UserWarning):
        sid.verify_exhaustive(F31, 2, 1)


def test_margin_monotone_in_c(rng):
    for _ in range(30):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 3))
        a = random_pointset(rng, q, n)
        if a.size in (0, q**n):
            continue
        b = make_cube(q, 1)
        values = [float(sid.margin(b, a, c)) for c in (1.5, 2.0, 3.0, 5.0, 9.0)]
        assert all(x <= y + 1e-9 for x, y in zip(values, values[1:]))


def test_adversary_line_n3_exhaustive_max_is_two():
    v = sid.adversary_search(F21, 3, seed=1)
    assert v.note.startswith("exhaustive")
    assert abs(v.required_C - 2.0) < 1e-12


def test_adversary_f31_n1():
    v = sid.adversary_search(F31, 1, seed=1)
    assert sorted(v.witness.points()) == [0, 1]
    assert abs(v.required_C - 3.7095112913514545) < 1e-10


def test_adversary_f31_n2_true_max():
    v = sid.adversary_search(F31, 2, seed=1)
    cap_value = math.log(4 / 81) / math.log(4 / 9)
    # the exhaustive maximum is at least the cap witness value ("or better")
    assert v.required_C >= cap_value - 1e-12
    # and is exactly the n=1 value, achieved by a line-times-pair host
    assert abs(v.required_C - math.log(2 / 9) / math.log(2 / 3)) < 1e-10
    assert sid.required_C(F31, v.witness) == pytest.approx(v.required_C)


def test_adversary_portfolio_path():
    # 2^(2^5) hosts forces the non-exhaustive portfolio + local search
    v = sid.adversary_search(F21, 5, seed=3)
    assert v.note == "portfolio + local search"
    assert abs(v.required_C - 2.0) < 1e-12  # the identity pins every host at 2
    v2 = sid.adversary_search(F22, 5, seed=3, budget=1 << 20)
    assert v2.required_C <= 4 + 1e-9  # C_4 is Sidorenko, so 4 bounds any host


def test_self_consistency_verify_at_exhaustive_max():
    # the exhaustive max of required_C is the least valid C at this n
    for b, q, n in ((F21, 2, 2), (F21, 2, 3), (F22, 2, 2)):
        adv = sid.adversary_search(b, n, seed=0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            v = sid.verify_exhaustive(b, adv.required_C * (1 + 1e-12) + 1e-12, n)
        assert v.status == "verified"


def test_random_required_c_stays_below_size_bound(rng):
    # random hosts cannot push required_C above |B| (Sidorenko configurations)
    for b in (F21, F22, make_circuit(3)):
        for _ in range(40):
            n = int(rng.integers(1, 4))
            a = random_pointset(rng, 2, n)
            if a.size in (0, 2**n):
                continue
            assert sid.required_C(b, a) <= len(b.points) + 1e-9


def test_supersaturation_line():
    rep = sid.supersaturation_check(F21, 2, 3, Fraction(2))
    assert rep.status == "ok"
    assert rep.host_size == 2  # D * q^0 with r = 2
    assert rep.min_slack > 0


def test_supersaturation_prefactor_implies_copy():
    rep = sid.supersaturation_check(F21, 2, 3, Fraction(4))
    assert rep.status == "ok"
    assert rep.bound_nonnegative == rep.instances  # bound >= 0 everywhere
    assert rep.min_slack > 0


def test_supersaturation_square_n4():
    rep = sid.supersaturation_check(F22, 4, 4, Fraction(2), samples=100, seed=3)
    assert rep.status == "ok"
    assert rep.host_size == 8
    assert rep.min_slack > 0


def test_product_check_line_times_line():
    rep = sid.product_sidorenko_check(F21, 2, F21, 2, 3)
    assert rep.status == "ok" and rep.instances == 256


def test_product_check_f31_squared():
    rep = sid.product_sidorenko_check(F31, Fraction("13.901"), F31,
                                      Fraction("13.901"), 2)
    assert rep.status == "ok"
    assert rep.c_product == pytest.approx(13.901**2)


def test_product_check_boundary_filter():
    single = AffineConfiguration(2, 1, [0])
    with pytest.raises(DomainError):
        sid.product_sidorenko_check(F21, 2, single, 0, 2)


def test_sweep_matches_per_host_counts():
    counts = sid._sweep_hom_totals(F22, 2)
    for mask in range(16):
        a = PointSet(2, 2, mask)
        assert counts[mask] == hom.hom_count(F22, a, with_aut=False).total

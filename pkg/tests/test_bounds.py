from fractions import Fraction

import pytest

from afflab import bounds
from afflab.bounds import ExtendedNumber, eval_bound, iterated_log
from afflab.errors import BudgetError, DomainError
from afflab.params import sigma3, sigma_value


def test_sigma_values():
    assert sigma_value(2) == 2
    assert sigma_value(3) == Fraction("13.901")
    with pytest.raises(DomainError):
        sigma_value(5)


def test_sigma3_env_override(monkeypatch):
    monkeypatch.setenv("AFFLAB_SIGMA3", "14.25")
    assert sigma3() == Fraction("14.25")
    v = eval_bound("offdiag_f3", {"t": 1})
    assert v.value == 1  # (t-1)(...) + t with t = 1
    v2 = eval_bound("offdiag_f3", {"t": 2})
    assert v2.rational == (Fraction("14.25")**2 - 2) + 2


def test_exact_evaluators():
    assert eval_bound("nelson_nomoto", {"t": 2}).value == 12
    assert eval_bound("nelson_nomoto", {"t": 5}).value == 6 * 32
    assert eval_bound("offdiag_f2", {"t": 4}).value == 10
    assert eval_bound("offdiag_f2", {"t": 5}).value == 4 * (36 - 8) + 8
    assert eval_bound("thm51_tower", {"q": 2, "s": 2, "t": 2}).value == 65536
    assert eval_bound("thm63", {"t": 4, "C": 6, "r": 5, "p": 4}).value == 10


def _as_fraction(x: ExtendedNumber) -> Fraction:
    return Fraction(x.value) if x.kind == "exact" else x.rational


def test_offdiag_f3_matches_formula():
    c0 = Fraction("13.901")
    for t in (1, 2, 3):
        got = eval_bound("offdiag_f3", {"t": t})
        assert _as_fraction(got) == (t - 1) * (c0**t - t) + t


def test_height_convention_flag():
    default = eval_bound("thm51_tower", {"q": 2, "s": 2, "t": 2})
    levels = eval_bound("thm51_tower", {"q": 2, "s": 2, "t": 2,
                                        "height_convention": "levels"})
    assert default.value == 2**(2**4) and levels.value == 2**4


def test_missing_parameter_named():
    with pytest.raises(DomainError, match="t"):
        eval_bound("nelson_nomoto", {})
    with pytest.raises(DomainError, match="ts"):
        eval_bound("diag_tower", {"q": 2})
    with pytest.raises(DomainError):
        eval_bound("no_such_bound", {"t": 2})


def test_iterated_log_examples():
    assert iterated_log(65536, 2, 2).value == 4
    assert iterated_log(1, 2, 2).kind == "neg_inf"
    assert iterated_log(1, 2, 1).value == 0
    assert iterated_log(100, 10, 0).value == 100
    # sticky sentinel
    assert iterated_log(1, 2, 5).kind == "neg_inf"


def test_iterated_log_peels_matching_towers():
    tower = eval_bound("thm51_tower", {"q": 2, "s": 4, "t": 6})
    peeled = iterated_log(tower, 2, 3)
    assert peeled.value == 2**12


def test_thm51_log_check_grid():
    for s in range(1, 5):
        for t in range(2, 7):
            assert bounds.thm51_log_check(2, s, t) <= 2 * t


def test_thm51_recursion():
    assert eval_bound("thm51_recursion", {"q": 2, "s": 1, "t": 5}).value == 5
    assert eval_bound("thm51_recursion", {"q": 2, "s": 2, "t": 2}).value == 8
    assert eval_bound("thm51_recursion", {"q": 2, "s": 3, "t": 2}).value == 2 * 2**8
    with pytest.raises(BudgetError):
        eval_bound("thm51_recursion", {"q": 2, "s": 5, "t": 6})


def test_taylor_tower():
    assert eval_bound("taylor_tower", {"t": 2, "k": 2}).value == 2**(3**(2**3))
    tall = eval_bound("taylor_tower", {"t": 3, "k": 3})
    assert tall.kind == "tower"
    assert tall > eval_bound("taylor_tower", {"t": 2, "k": 3})


def test_tower_materialization_boundary():
    small = ExtendedNumber.tower(2, 2, 4)
    assert small.kind == "exact" and small.value == 65536
    big = ExtendedNumber.tower(2, 3, 100)
    assert big.kind == "tower"
    assert big.base == 2 and big.height == 3 and big.top == 100


def test_tower_comparisons():
    a = ExtendedNumber.tower(2, 3, 100)
    b = ExtendedNumber.tower(2, 3, 101)
    c = ExtendedNumber.tower(2, 4, 100)
    assert a < b < c
    assert a > 10**1000
    assert ExtendedNumber.exact(3) < a
    d = ExtendedNumber.tower(3, 3, 100)
    assert a < d  # same shape, bigger base


def test_tower_vs_int_tight():
    t = ExtendedNumber.tower_levels((Fraction(2),), 16)
    assert t.kind == "exact" and t.value == 65536
    big = ExtendedNumber.tower(2, 2, 10**7)  # 2^(2^10^7), far past the cap
    assert big.kind == "tower"
    assert big > 2**(10**6)


def test_sigma3_tower_interval_comparisons():
    a = eval_bound("diag_tower", {"q": 3, "ts": [2, 2]})
    b = eval_bound("diag_tower", {"q": 3, "ts": [2, 3]})
    c = eval_bound("diag_tower", {"q": 3, "ts": [2, 2, 2]})
    assert a < b
    assert a < c
    assert a.compare(a) == 0


def test_monotone_in_parameters_grid():
    sweeps = {
        "nelson_nomoto": ("t", range(2, 9), {}),
        "offdiag_f2": ("t", range(1, 9), {}),
        "offdiag_f3": ("t", range(1, 9), {}),
        "sec7_delta": ("t", range(1, 9), {"delta": Fraction(1, 2)}),
        "raff_diag": ("k", range(2, 5), {"q": 2, "t": 3}),
        "raff_offdiag": ("s", range(1, 5), {"q": 3, "t": 4}),
        "thm63": ("t", range(1, 9), {"C": 6, "r": 5, "p": 4}),
    }
    for bound_id, (var, grid, fixed) in sweeps.items():
        prev = None
        for x in grid:
            cur = eval_bound(bound_id, {**fixed, var: x})
            if prev is not None:
                assert prev <= cur, (bound_id, var, x)
            prev = cur
    for q in (2, 3):
        for var, grid, fixed in [("t", range(2, 9), {"q": q, "s": 3}),
                                 ("s", range(1, 5), {"q": q, "t": 4})]:
            prev = None
            for x in grid:
                cur = eval_bound("thm51_tower", {**fixed, var: x})
                if prev is not None:
                    assert prev <= cur
                prev = cur
    # eq1/thm42 monotone in n and t
    for bound_id in ("eq1_rhs", "thm42_rhs"):
        for q in (2, 3):
            prev = None
            for n in range(2, 9):
                cur = eval_bound(bound_id, {"q": q, "n": n, "t": 2})
                if prev is not None:
                    assert float(prev) <= float(cur)
                prev = cur
            prev = None
            for t in range(1, 7):
                cur = eval_bound(bound_id, {"q": q, "n": 8, "t": t})
                if prev is not None:
                    assert float(prev) <= float(cur)
                prev = cur


def test_dominance_offdiag_over_nelson():
    for t in range(2, 31):
        assert eval_bound("offdiag_f2", {"t": t}) < eval_bound("nelson_nomoto", {"t": t})


def test_ramsey_values_below_bounds():
    # computed R_2(2,2) = 3 sits below both off-diagonal bound evaluators
    assert 3 < float(eval_bound("offdiag_f2", {"t": 2}))
    assert 3 < eval_bound("nelson_nomoto", {"t": 2}).value
    # computed R_q(t, t) small cases below the diagonal tower bound
    assert 3 < float(eval_bound("diag_tower", {"q": 2, "ts": [2, 2]}))


def test_q_pow_exact_when_integral():
    v = eval_bound("eq1_rhs", {"q": 2, "n": 2, "t": 1})  # 2^(2 - 2/1 + 2) = 4
    assert v.kind == "exact" and v.value == 4


def test_neg_inf_ordering():
    neg = ExtendedNumber.NEG_INF
    assert neg < ExtendedNumber.exact(0)
    assert neg.compare(neg) == 0


def test_json_forms():
    assert eval_bound("nelson_nomoto", {"t": 2}).to_json()["form"] == "exact"
    assert eval_bound("taylor_tower", {"t": 3, "k": 3}).to_json()["form"] == "tower"
    assert eval_bound("raff_offdiag", {"q": 3, "s": 2, "t": 4}).to_json()["form"] == "real"

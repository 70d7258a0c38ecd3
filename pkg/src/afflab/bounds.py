"""Closed-form bound evaluators with overflow-safe tower arithmetic.

Values are ExtendedNumbers: exact big integers while they fit the bit cap,
symbolic exponential towers beyond it, and interval-padded reals for
irrational expressions (anything involving sigma_3).  Tower comparisons run
in iterated-log space and either certify an ordering or raise
ComparisonUndecided; they never silently return a wrong inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import BudgetError, DomainError
from .params import sigma_value

BITS_CAP_DEFAULT = 1 << 20  # materialize exact integers up to this many bits
_IV = mpmath.iv


class ComparisonUndecided(RuntimeError):
    """The two values are indistinguishable at the working tolerance."""


@dataclass(frozen=True)
class ExtendedNumber:
    """exact(int) | tower(levels bottom-up, top) | real(value, tolerance) | -inf.

    Towers store one rational base per level so alternating-base towers are
    representable; uniform towers expose base/height in the classic sense.
    A real may carry the exact rational it rounds, when one exists.
    """

    kind: str
    value: int | None = None
    levels: tuple[Fraction, ...] = ()
    top: int | None = None
    real_value: float | None = None
    tolerance: float = 0.0
    rational: Fraction | None = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def exact(cls, v: int) -> "ExtendedNumber":
        return cls("exact", value=int(v))

    @classmethod
    def real(cls, v: float, tolerance: float = 0.0,
             rational: Fraction | None = None) -> "ExtendedNumber":
        if rational is not None and rational.denominator == 1:
            return cls.exact(rational.numerator)
        return cls("real", real_value=float(v), tolerance=float(tolerance),
                   rational=rational)

    @classmethod
    def from_rational(cls, r: Fraction) -> "ExtendedNumber":
        if r.denominator == 1:
            return cls.exact(r.numerator)
        return cls.real(float(r), abs(float(r)) * 1e-15, rational=r)

    @classmethod
    def tower(cls, base, height: int, top: int,
              bits_cap: int = BITS_CAP_DEFAULT) -> "ExtendedNumber":
        if height < 0:
            raise DomainError("tower height must be >= 0")
        return cls.tower_levels((Fraction(base),) * height, top, bits_cap)

    @classmethod
    def tower_levels(cls, levels, top: int,
                     bits_cap: int = BITS_CAP_DEFAULT) -> "ExtendedNumber":
        levels = tuple(Fraction(b) for b in levels)
        for b in levels:
            if b <= 1:
                raise DomainError("tower bases must exceed 1")
        if int(top) < 1:
            raise DomainError("tower top must be >= 1")
        if not levels:
            return cls.exact(int(top))
        mat = _materialize(levels, int(top), bits_cap)
        if mat is not None:
            return cls.exact(mat)
        return cls("tower", levels=levels, top=int(top))

    # -- views ------------------------------------------------------------

    @property
    def base(self) -> Fraction:
        if self.kind != "tower":
            raise DomainError("only towers have a base")
        if len(set(self.levels)) != 1:
            raise DomainError("tower has mixed bases; inspect .levels")
        return self.levels[0]

    @property
    def height(self) -> int:
        if self.kind != "tower":
            raise DomainError("only towers have a height")
        return len(self.levels)

    def is_integer(self) -> bool:
        return self.kind == "exact"

    def __float__(self) -> float:
        if self.kind == "exact":
            try:
                return float(self.value)
            except OverflowError:
                return math.inf
        if self.kind == "real":
            return self.real_value
        if self.kind == "neg_inf":
            return -math.inf
        v = float(self.top)
        for b in reversed(self.levels):
            if v * math.log2(float(b)) > 1020:
                return math.inf
            v = float(b)**v
        return v

    def __repr__(self) -> str:
        if self.kind == "exact":
            return ("ExtendedNumber(%d)" % self.value) if self.value.bit_length() <= 64 \
                else "ExtendedNumber(exact, %d bits)" % self.value.bit_length()
        if self.kind == "real":
            return "ExtendedNumber(%r +- %g)" % (self.real_value, self.tolerance)
        if self.kind == "neg_inf":
            return "ExtendedNumber(-inf)"
        return "ExtendedNumber(tower %s top %d)" % (
            "^".join(str(b) for b in self.levels), self.top)

    def to_json(self) -> dict:
        if self.kind == "exact":
            return {"form": "exact", "value": self.value if self.value.bit_length() <= 53
                    else str(self.value), "bits": self.value.bit_length()}
        if self.kind == "real":
            out = {"form": "real", "value": self.real_value, "tolerance": self.tolerance}
            if self.rational is not None:
                out["rational"] = str(self.rational)
            return out
        if self.kind == "neg_inf":
            return {"form": "neg_inf"}
        return {"form": "tower", "levels": [str(b) for b in self.levels],
                "top": self.top, "float": float(self)}

    # -- comparisons --------------------------------------------------------

    def compare(self, other) -> int:
        """-1, 0, or 1; raises ComparisonUndecided when intervals overlap."""
        if not isinstance(other, ExtendedNumber):
            other = _coerce(other)
        return _compare(self, other)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0


ExtendedNumber.NEG_INF = ExtendedNumber("neg_inf")


def _coerce(x) -> ExtendedNumber:
    if isinstance(x, ExtendedNumber):
        return x
    if isinstance(x, bool):
        raise DomainError("cannot compare with bool")
    if isinstance(x, int):
        return ExtendedNumber.exact(x)
    if isinstance(x, Fraction):
        return ExtendedNumber.from_rational(x)
    if isinstance(x, float):
        return ExtendedNumber.real(x)
    raise DomainError("cannot interpret %r as a number" % (x,))


def _materialize(levels: tuple[Fraction, ...], top: int, bits_cap: int) -> int | None:
    """Exact integer value when all bases are integers and bits stay capped."""
    if any(b.denominator != 1 for b in levels):
        return None
    v = top
    for b in reversed(levels):
        bi = b.numerator
        if v > bits_cap or v * math.log2(bi) > bits_cap:
            return None
        v = bi**v
    return v


# interval evaluation; exponents may exceed float range but their own bit
# size must stay sane for mpmath's integer exponents
_EXP_BITS_LIMIT = 1 << 22


def _iv_eval(x: ExtendedNumber):
    """mpmath interval for x, or None when the tower is too tall."""
    if x.kind == "exact":
        return _IV.mpf(x.value)
    if x.kind == "real":
        if x.rational is not None:
            return _IV.mpf(mpmath.mpf(x.rational.numerator) / x.rational.denominator)
        return _IV.mpf([x.real_value - x.tolerance - abs(x.real_value) * 1e-15,
                        x.real_value + x.tolerance + abs(x.real_value) * 1e-15])
    if x.kind == "neg_inf":
        return _IV.mpf("-inf")
    val = _IV.mpf(x.top)
    for b in reversed(x.levels):
        hi = mpmath.mpf(val.b)
        # b**val has a binary exponent of about val*log2(b); that exponent is
        # stored as a plain integer, so its bit size log2(val) must stay sane
        if hi > 2 and mpmath.log(hi, 2) > _EXP_BITS_LIMIT:
            return None
        base_iv = _IV.mpf(b.numerator) / b.denominator
        val = base_iv**val
    return val


def _compare(a: ExtendedNumber, b: ExtendedNumber) -> int:
    if a.kind == "neg_inf" or b.kind == "neg_inf":
        if a.kind == b.kind:
            return 0
        return -1 if a.kind == "neg_inf" else 1
    if a.kind == "exact" and b.kind == "exact":
        return (a.value > b.value) - (a.value < b.value)
    if a.kind == "real" and b.kind == "real" and a.rational is not None \
            and b.rational is not None:
        return (a.rational > b.rational) - (a.rational < b.rational)
    if a.kind == "tower" and b.kind == "tower":
        # peel identical bottom levels; comparison is monotone through them
        la, lb = list(a.levels), list(b.levels)
        while la and lb and la[0] == lb[0]:
            la.pop(0)
            lb.pop(0)
        if not la and not lb:
            return (a.top > b.top) - (a.top < b.top)
        a2 = ExtendedNumber.tower_levels(la, a.top) if la else ExtendedNumber.exact(a.top)
        b2 = ExtendedNumber.tower_levels(lb, b.top) if lb else ExtendedNumber.exact(b.top)
        if (a2.kind, b2.kind) != (a.kind, b.kind) or la != list(a.levels) \
                or lb != list(b.levels):
            return _compare(a2, b2)
    if a.kind == "tower" and b.kind == "exact":
        return _cmp_tower_int(a, b.value)
    if a.kind == "exact" and b.kind == "tower":
        return -_cmp_tower_int(b, a.value)
    iva, ivb = _iv_eval(a), _iv_eval(b)
    if iva is not None and ivb is not None:
        if mpmath.mpf(iva.b) < mpmath.mpf(ivb.a):
            return -1
        if mpmath.mpf(iva.a) > mpmath.mpf(ivb.b):
            return 1
        if iva.delta == 0 and ivb.delta == 0 and iva.a == ivb.a:
            return 0
        raise ComparisonUndecided("intervals overlap: %s vs %s" % (iva, ivb))
    if a.kind == "tower" and b.kind == "tower":
        # different bottom bases and both too tall to evaluate: decide only
        # the aligned case (base and rest both ordered the same way)
        rest_a = ExtendedNumber.tower_levels(a.levels[1:], a.top)
        rest_b = ExtendedNumber.tower_levels(b.levels[1:], b.top)
        c_rest = _compare(rest_a, rest_b)
        c_base = (a.levels[0] > b.levels[0]) - (a.levels[0] < b.levels[0])
        if c_rest == 0 and c_base == 0:
            return 0
        if c_rest >= 0 and c_base >= 0:
            return 1
        if c_rest <= 0 and c_base <= 0:
            return -1
    raise ComparisonUndecided("cannot certify %r vs %r" % (a, b))


def _cmp_tower_int(t: ExtendedNumber, m: int) -> int:
    """Compare a tower against an exact integer via log descent."""
    if m < 2:
        return 1  # bases > 1 and top >= 1 keep towers >= 2 > m... top >= 1 checked below
    val = _materialize(t.levels, t.top, max(m.bit_length() * 2 + 64, 1 << 12))
    if val is not None:
        return (val > m) - (val < m)
    # tower = b^X with X the remaining tower; compare X against log_b(m)
    b = t.levels[0]
    rest = ExtendedNumber.tower_levels(t.levels[1:], t.top)
    # certified integer bracket of log_b(m): k_lo <= log_b(m) <= k_hi
    k_lo = _floor_log(m, b)
    c_low = _compare(rest, ExtendedNumber.exact(k_lo))
    if c_low <= 0:
        return -1  # X <= floor(log_b m) and b^X <= m; strictness checked next
    c_hi = _compare(rest, ExtendedNumber.exact(k_lo + 1))
    if c_hi >= 0:
        return 1
    raise ComparisonUndecided("tower within one log step of %d" % m)


def _floor_log(m: int, base: Fraction) -> int:
    """Largest k with base^k <= m: float estimate, then exact adjustment."""
    if m < 1:
        raise DomainError("floor log needs m >= 1")
    if base.denominator == 1 and base.numerator == 2:
        return m.bit_length() - 1
    lb = math.log(base.numerator) - math.log(base.denominator)
    k = max(int((m.bit_length() - 1) * math.log(2) / lb), 0)
    while base**(k + 1) <= m:
        k += 1
    while k > 0 and base**k > m:
        k -= 1
    return k


# -- iterated logarithm ----------------------------------------------------------

def iterated_log(x, base, k: int) -> ExtendedNumber:
    """k-th iterated logarithm to the given base, with the -inf sentinel.

    log^(0) is the identity; each further level takes the log when the
    previous level is positive and collapses to -inf otherwise (so once any
    intermediate value is <= 0 the sentinel is sticky).
    """
    base = Fraction(base)
    if base <= 1:
        raise DomainError("log base must exceed 1")
    cur = _coerce(x)
    for _ in range(k):
        cur = _log_once(cur, base)
    return cur


def _log_once(x: ExtendedNumber, base: Fraction) -> ExtendedNumber:
    if x.kind == "neg_inf":
        return ExtendedNumber.NEG_INF
    if x.kind == "tower":
        if x.levels[0] == base:
            return ExtendedNumber.tower_levels(x.levels[1:], x.top)
        iv = _iv_eval(x)
        if iv is None:
            raise ComparisonUndecided(
                "cannot take log base %s of a tall tower with base %s"
                % (base, x.levels[0]))
        return _real_from_iv(_IV.log(iv) / _IV.log(_IV.mpf(base.numerator) / base.denominator))
    if x.kind == "exact":
        if x.value <= 0:
            return ExtendedNumber.NEG_INF
        return _log_number(Fraction(x.value), base)
    # real
    lo = x.real_value - x.tolerance
    if lo <= 0 and x.real_value <= 0:
        return ExtendedNumber.NEG_INF
    if lo <= 0:
        raise ComparisonUndecided("value straddles 0 at tolerance; log undefined")
    if x.rational is not None:
        return _log_number(x.rational, base)
    val = math.log(x.real_value) / math.log(float(base))
    tol = x.tolerance / (lo * math.log(float(base))) + abs(val) * 1e-14 + 1e-300
    return ExtendedNumber.real(val, tol)


def _log_number(v: Fraction, base: Fraction) -> ExtendedNumber:
    """log_base(v) for exact rational v > 0; exact when it is an integer."""
    if v <= 0:
        return ExtendedNumber.NEG_INF
    if v >= 1 and base.denominator == 1 and v.denominator == 1:
        k = _floor_log(v.numerator, base)
        if base.numerator**k == v.numerator:
            return ExtendedNumber.exact(k)
    val = (math.log(v.numerator) - math.log(v.denominator)) / math.log(float(base))
    return ExtendedNumber.real(val, abs(val) * 1e-14 + 1e-300)


def _real_from_iv(iv) -> ExtendedNumber:
    lo, hi = float(mpmath.mpf(iv.a)), float(mpmath.mpf(iv.b))
    mid = (lo + hi) / 2
    return ExtendedNumber.real(mid, (hi - lo) / 2 + abs(mid) * 1e-14 + 1e-300)


# -- bound registry ----------------------------------------------------------------

def _need(params: dict, name: str, kind=int):
    if name not in params:
        raise DomainError("bound parameter %r is required" % name)
    v = params[name]
    if kind is int:
        if isinstance(v, bool) or int(v) != v:
            raise DomainError("parameter %r must be an integer, got %r" % (name, v))
        return int(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    if isinstance(v, str):
        return Fraction(v)
    raise DomainError("parameter %r must be numeric, got %r" % (name, v))


def _tower_height(levels: int, params: dict) -> int:
    """Apply the height convention: 'base-count' (default) counts base
    occurrences; 'levels' treats the top as one of the height levels."""
    conv = params.get("height_convention", "base-count")
    if conv == "base-count":
        return levels
    if conv == "levels":
        return levels - 1
    raise DomainError("height_convention must be 'base-count' or 'levels'")


def _q_pow(q: int, exponent: Fraction) -> ExtendedNumber:
    """q^exponent: exact for integer exponents, interval real otherwise."""
    if exponent.denominator == 1:
        e = exponent.numerator
        if e >= 0:
            return ExtendedNumber.exact(q**e)
        return ExtendedNumber.from_rational(Fraction(1, q**(-e)))
    with mpmath.workdps(50):
        v = mpmath.power(q, mpmath.mpf(exponent.numerator) / exponent.denominator)
        return ExtendedNumber.real(float(v), abs(float(v)) * 1e-13)


def _eval_taylor_tower(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    k = _need(params, "k")
    if t < 2 or k < 2:
        raise DomainError("taylor_tower needs t >= 2 and k >= 2")
    h = _tower_height(2 * k * (t - 1), params)
    seq = [Fraction(k) if i % 2 == 0 else Fraction(3) for i in range(h)]
    top = int(seq[-1])
    return ExtendedNumber.tower_levels(seq[:-1], top)


def _eval_diag_tower(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    ts = params.get("ts")
    if ts is None:
        raise DomainError("bound parameter 'ts' is required (list of targets)")
    ts = [int(t) for t in ts]
    if len(ts) < 2 or any(t < 2 for t in ts):
        raise DomainError("diag_tower needs k >= 2 targets, each >= 2")
    if ts != sorted(ts):
        raise DomainError("targets must be nondecreasing (t_1 <= ... <= t_k)")
    sigma = sigma_value(q)
    height = _tower_height(sum(t - 1 for t in ts[:-1]) + 1, params)
    return ExtendedNumber.tower(sigma, height, 3 * ts[-1])


def _eval_nelson_nomoto(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    if t < 2:
        raise DomainError("nelson_nomoto needs t >= 2")
    return ExtendedNumber.exact((t + 1) * 2**t)


def _eval_offdiag_f2(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    if t < 1:
        raise DomainError("offdiag_f2 needs t >= 1")
    k = -(-t // 4)
    return ExtendedNumber.exact((t - 1) * (6**k - 4 * k) + 4 * k)


def _eval_offdiag_f3(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    if t < 1:
        raise DomainError("offdiag_f3 needs t >= 1")
    c0 = sigma_value(3)
    return ExtendedNumber.from_rational((t - 1) * (c0**t - t) + t)


def _eval_eq1_rhs(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    n = _need(params, "n")
    t = _need(params, "t")
    if t < 1 or n < t:
        raise DomainError("eq1_rhs needs n >= t >= 1")
    sigma = sigma_value(q)
    exponent = Fraction(n) - Fraction(n) / ((sigma - 1) * sigma**(t - 1)) + 2
    return _q_pow(q, exponent)


def _eval_thm42_rhs(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    n = _need(params, "n")
    t = _need(params, "t")
    if t < 0 or n < t:
        raise DomainError("thm42_rhs needs n >= t >= 0")
    sigma = sigma_value(q)
    exponent = Fraction(n) - Fraction(n - t) / (sigma**t - t)
    return _q_pow(q, exponent)


def _eval_thm51_tower(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    s = _need(params, "s")
    t = _need(params, "t")
    if s < 1 or t < 2:
        raise DomainError("thm51_tower needs s >= 1 and t >= 2")
    sigma = sigma_value(q)
    return ExtendedNumber.tower(sigma, _tower_height(s, params), 2 * t)


def _eval_thm51_recursion(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    s = _need(params, "s")
    t = _need(params, "t")
    if s < 1 or t < 1:
        raise DomainError("thm51_recursion needs s >= 1 and t >= 1")
    sigma = sigma_value(q)
    if sigma.denominator == 1:
        val = t
        for _ in range(s - 1):
            if val * math.log2(sigma.numerator) > BITS_CAP_DEFAULT:
                raise BudgetError("recursion value exceeds the %d-bit cap; use"
                                  " thm51_log_check for the iterated-log form"
                                  % BITS_CAP_DEFAULT)
            val = t * sigma.numerator**val
        return ExtendedNumber.exact(val)
    with mpmath.workdps(50):
        sig = mpmath.mpf(sigma.numerator) / sigma.denominator
        val = mpmath.mpf(t)
        for _ in range(s - 1):
            if val > _EXP_BITS_LIMIT:
                raise BudgetError("recursion value too large even for mpmath")
            val = t * mpmath.power(sig, val)
        return ExtendedNumber.real(float(val), abs(float(val)) * 1e-12)


def thm51_log_check(q: int, s: int, t: int) -> float:
    """log_sigma^(s-1) of the recursion value t*sigma^(t*sigma^...), stably.

    The recursion value R(s) satisfies log_sigma(R(s)) = R(s-1) + log_sigma t,
    so one symbolic log avoids ever materializing R(s); the remaining s-2
    logs act on representable magnitudes.
    """
    if s < 1 or t < 1:
        raise DomainError("needs s >= 1 and t >= 1")
    sigma = sigma_value(q)
    with mpmath.workdps(60):
        sig = mpmath.mpf(sigma.numerator) / sigma.denominator
        if s == 1:
            return float(t)
        # R(s-1) via direct recursion in mpmath
        val = mpmath.mpf(t)
        for _ in range(s - 2):
            if val > _EXP_BITS_LIMIT:
                raise BudgetError("intermediate recursion value too large")
            val = t * mpmath.power(sig, val)
        cur = val + mpmath.log(t, sig)  # = log_sigma(R(s))
        for _ in range(s - 2):
            if cur <= 0:
                return -math.inf
            cur = mpmath.log(cur, sig)
        return float(cur)


def _eval_thm63(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    c = _need(params, "C", kind=Fraction)
    r = _need(params, "r")
    p = _need(params, "p")
    if t < 1 or p < 1 or r < 1:
        raise DomainError("thm63 needs t, p, r >= 1")
    k = -(-t // p)
    return ExtendedNumber.from_rational((t - 1) * (c**k - (r - 1) * k) + (r - 1) * k)


def _eval_sec7_delta(params: dict) -> ExtendedNumber:
    t = _need(params, "t")
    delta = _need(params, "delta", kind=Fraction)
    if t < 1 or delta <= 0:
        raise DomainError("sec7_delta needs t >= 1 and delta > 0")
    return ExtendedNumber.from_rational(t * (2 + 1 / delta)**t)


def _eval_raff_diag(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    k = _need(params, "k")
    t = _need(params, "t")
    if k < 2 or t < 1:
        raise DomainError("raff_diag needs k >= 2 and t >= 1")
    sigma = sigma_value(q)
    if k & (k - 1) == 0:
        # log_2 k is the exact integer exponent here
        return ExtendedNumber.from_rational((k.bit_length() - 1) * sigma**t)
    with mpmath.workdps(50):
        v = mpmath.log(k, 2) * mpmath.mpf(sigma.numerator) ** t / sigma.denominator**t
        return ExtendedNumber.real(float(v), abs(float(v)) * 1e-13)


def _eval_raff_offdiag(params: dict) -> ExtendedNumber:
    q = _need(params, "q")
    s = _need(params, "s")
    t = _need(params, "t")
    if s < 1 or t < 1:
        raise DomainError("raff_offdiag needs s >= 1 and t >= 1")
    sigma = sigma_value(q)
    with mpmath.workdps(50):
        sig = mpmath.mpf(sigma.numerator) / sigma.denominator
        v = mpmath.log(sig, q) * (sig - 1) * sig**(s - 1) * t
        return ExtendedNumber.real(float(v), abs(float(v)) * 1e-13)


BOUNDS: dict[str, Callable[[dict], ExtendedNumber]] = {
    "taylor_tower": _eval_taylor_tower,
    "diag_tower": _eval_diag_tower,
    "nelson_nomoto": _eval_nelson_nomoto,
    "offdiag_f2": _eval_offdiag_f2,
    "offdiag_f3": _eval_offdiag_f3,
    "eq1_rhs": _eval_eq1_rhs,
    "thm42_rhs": _eval_thm42_rhs,
    "thm51_tower": _eval_thm51_tower,
    "thm51_recursion": _eval_thm51_recursion,
    "thm63": _eval_thm63,
    "sec7_delta": _eval_sec7_delta,
    "raff_diag": _eval_raff_diag,
    "raff_offdiag": _eval_raff_offdiag,
}


def eval_bound(bound_id: str, params: dict) -> ExtendedNumber:
    """Evaluate one registered closed-form bound on named parameters."""
    if bound_id not in BOUNDS:
        raise DomainError("unknown bound id %r; known: %s"
                          % (bound_id, ", ".join(sorted(BOUNDS))))
    return BOUNDS[bound_id](dict(params))

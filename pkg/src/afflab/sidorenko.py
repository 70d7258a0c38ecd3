"""Weakly-Sidorenko margins, exhaustive verification, and adversary search.

B is C-weakly Sidorenko when hom(B, A) >= alpha^C N^r for every host A of
density alpha.  The margin is the signed gap hom - alpha^C N^r; integer C
keeps it an exact rational, irrational C drops to log-domain floats with an
explicit tolerance relative to N^r.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import hom, kernels
from .config import AffineConfiguration, product
from .errors import BudgetError, DomainError
from .params import sigma_value
from .space import PointSet, enumerate_subspaces

MARGIN_REL_TOL = 1e-9  # absolute tolerance for float margins, relative to N^r

EXHAUSTIVE_HOST_LIMIT = 1 << 26  # most subsets a sweep will enumerate


@dataclass(frozen=True)
class SidorenkoParams:
    """Query constants: the exponent C, sigma_q, and the Lemma-scale D."""

    C: Fraction | float
    sigma_q: Fraction = Fraction(2)
    D: Fraction | float | None = None

    @classmethod
    def for_field(cls, q: int, C=None, D=None) -> "SidorenkoParams":
        sig = sigma_value(q)
        return cls(C=sig if C is None else C, sigma_q=sig, D=D)


@dataclass
class SidorenkoVerdict:
    status: str  # verified | counterexample | inconclusive
    witness: PointSet | None
    margin: float | Fraction | None
    required_C: float | None
    n_checked: int
    subsets_examined: int
    boundary: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "margin": float(self.margin) if self.margin is not None else None,
            "margin_exact": [str(self.margin)] if isinstance(self.margin, Fraction) else None,
            "required_C": self.required_C,
            "n_checked": self.n_checked,
            "subsets_examined": self.subsets_examined,
            "boundary": self.boundary,
            "note": self.note,
        }


def _as_exponent(c) -> tuple[bool, int | None]:
    """(is_integer, integer value) for an exponent given as int/Fraction/float."""
    if isinstance(c, bool):
        raise DomainError("C must be numeric")
    if isinstance(c, int):
        return True, c
    if isinstance(c, Fraction):
        return (c.denominator == 1), (c.numerator if c.denominator == 1 else None)
    if isinstance(c, float):
        return (c.is_integer(), int(c) if c.is_integer() else None)
    raise DomainError("C must be int, Fraction, or float, got %r" % type(c))


def margin(b: AffineConfiguration, a: PointSet, c,
           budget: int = hom.DEFAULT_BUDGET, backend: str | None = None):
    """hom(b, a) - alpha^C N^r; exact Fraction for integer C, else float.

    Density 0 and 1 both give margin 0 (no maps vs. the full-space identity).
    Float margins carry absolute error below MARGIN_REL_TOL * N^r.
    """
    size = a.ambient_size
    r = b.rank_aff
    if a.size == 0:
        return Fraction(0)
    if a.size == size:
        return Fraction(0)
    total = hom.hom_count(b, a, budget=budget, with_aut=False, backend=backend).total
    is_int, ci = _as_exponent(c)
    if is_int:
        return Fraction(total) - Fraction(a.size, size)**ci * size**r
    log_val = float(c) * (math.log(a.size) - math.log(size)) + r * math.log(size)
    return float(total) - math.exp(log_val)


def required_C(b: AffineConfiguration, a: PointSet,
               budget: int = hom.DEFAULT_BUDGET, backend: str | None = None) -> float:
    """ln(hom / N^r) / ln(alpha): the least C making the inequality tight.

    Degenerate densities 0 and 1 return 0 (the inequality is vacuous or an
    identity there).
    """
    size = a.ambient_size
    if a.size in (0, size):
        return 0.0
    total = hom.hom_count(b, a, budget=budget, with_aut=False, backend=backend).total
    if total == 0:
        return math.inf
    return _required_c_from_total(total, a.size, size, b.rank_aff)


def _required_c_from_total(total: int, a_size: int, size: int, r: int) -> float:
    return (math.log(total) - r * math.log(size)) / (math.log(a_size) - math.log(size))


# -- exhaustive verification ---------------------------------------------------

def _sweep_hom_totals(b: AffineConfiguration, n: int,
                      backend: str | None = None) -> np.ndarray:
    """hom(b, A) for every host A, indexed by host bitmask over q^n points."""
    size = b.q**n
    if size > 64:
        raise BudgetError("exhaustive sweep needs q^n <= 64 points, got %d" % size)
    if 1 << size > EXHAUSTIVE_HOST_LIMIT:
        raise BudgetError(
            "exhaustive sweep would enumerate %d subsets (limit %d)"
            % (1 << size, EXHAUSTIVE_HOST_LIMIT))
    lam = hom.lam_matrix(b)
    masks = kernels.build_span_masks(lam, b.q, n, backend=backend)
    return kernels.counts_all_hosts(masks, size, backend=backend)


def _lex_key(mask: int) -> tuple:
    out = []
    bits = mask
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def verify_exhaustive(b: AffineConfiguration, c, n: int,
                      backend: str | None = None) -> SidorenkoVerdict:
    """Check the weakly-Sidorenko inequality against every subset of F_q^n.

    Integer C runs entirely in exact integer arithmetic, so 'verified' means
    margin >= 0 with zero tolerance; irrational C uses float margins with
    the documented tolerance and flags near-boundary verdicts.
    """
    if not b.points:
        raise DomainError("cannot verify the empty configuration")
    if float(c) < len(b.points):
        warnings.warn(
            "C=%s is below |B|=%d; random hosts already force C >= |B|"
            % (c, len(b.points)), stacklevel=2)
    q = b.q
    size = q**n
    r = b.rank_aff
    counts = _sweep_hom_totals(b, n, backend=backend)
    n_hosts = 1 << size
    sizes = np.bitwise_count(np.arange(n_hosts, dtype=np.uint64)).astype(np.int64)
    is_int, ci = _as_exponent(c)
    worst_mask = -1
    worst_margin = None
    tol = 0.0
    boundary = False
    if is_int and ci >= 0:
        # hom * N^C >= |A|^C * N^r, all in integers
        if size**(ci + r) < (1 << 62):
            lhs = counts * size**ci
            rhs = sizes.astype(np.int64)**ci * size**r
            bad = np.nonzero(lhs < rhs)[0]
        else:
            bad = np.array([m for m in range(n_hosts)
                            if int(counts[m]) * size**ci < int(sizes[m])**ci * size**r],
                           dtype=np.int64)
        for m in bad:
            mm = int(m)
            mg = Fraction(int(counts[mm])) - Fraction(int(sizes[mm]), size)**ci * size**r
            if worst_margin is None or mg < worst_margin or (
                    mg == worst_margin and _lex_key(mm) < _lex_key(worst_mask)):
                worst_margin = mg
                worst_mask = mm
    else:
        tol = MARGIN_REL_TOL * float(size)**r
        cf = float(c)
        with np.errstate(divide="ignore"):
            log_alpha = np.log(sizes.astype(float)) - math.log(size)
        expected = np.exp(cf * log_alpha + r * math.log(size))
        expected[sizes == 0] = 0.0
        margins = counts.astype(float) - expected
        margins[sizes == 0] = 0.0
        margins[sizes == size] = 0.0
        bad = np.nonzero(margins < -tol)[0]
        proper = (sizes > 0) & (sizes < size)
        boundary = bool((np.abs(margins[proper]) <= tol).any())
        for m in bad:
            mm = int(m)
            mg = float(margins[mm])
            if worst_margin is None or mg < worst_margin or (
                    mg == worst_margin and _lex_key(mm) < _lex_key(worst_mask)):
                worst_margin = mg
                worst_mask = mm
    if worst_mask < 0:
        return SidorenkoVerdict("verified", None, None, None, n, n_hosts,
                                boundary=boundary)
    witness = PointSet(q, n, worst_mask)
    recheck = margin(b, witness, c)
    if not float(recheck) < 0:
        raise DomainError("counterexample failed to re-verify: margin %r" % (recheck,))
    req = required_C(b, witness)
    return SidorenkoVerdict("counterexample", witness, recheck, req, n, n_hosts)


# -- adversary search ----------------------------------------------------------

def _portfolio_hosts(b: AffineConfiguration, n: int, budget: int, seed: int):
    """Candidate hosts: flats and their complements, unions of flats,
    extremal b-free witnesses, and seeded random sets."""
    q = b.q
    size = q**n
    full = PointSet.full(q, n)
    hosts: list[PointSet] = []
    flats: list[PointSet] = []
    for t in range(0, n):
        for sub in enumerate_subspaces(q, n, t, "affine"):
            flats.append(sub.point_set())
    hosts.extend(flats)
    hosts.extend(f.complement() for f in flats)
    rng = np.random.Generator(np.random.Philox(key=seed))
    n_unions = min(64, max(8, budget // max(size, 1)))
    for _ in range(n_unions):
        k = int(rng.integers(2, 4))
        picks = rng.integers(0, len(flats), size=k)
        acc = flats[int(picks[0])]
        for i in picks[1:]:
            acc = acc.union(flats[int(i)])
        hosts.append(acc)
        hosts.append(acc.complement())
    try:
        from .extremal import ExtremalQuery, ex_aff
        rep = ex_aff(ExtremalQuery(q=q, n=n, family=(b,), mode="exact",
                                   budget=200_000, seed=seed))
        if rep.witness is not None:
            hosts.append(rep.witness)
    except BudgetError:
        pass
    for _ in range(16):
        bits = int.from_bytes(rng.bytes((size + 7) // 8), "little") & ((1 << size) - 1)
        hosts.append(PointSet(q, n, bits))
    return [h for h in hosts if 0 < h.size < full.size]


def adversary_search(b: AffineConfiguration, n: int, budget: int = 1 << 22,
                     seed: int = 0, backend: str | None = None) -> SidorenkoVerdict:
    """Maximize required_C over hosts in F_q^n.

    Exhaustive when 2^(q^n) subsets fit the budget (the result is then the
    true maximum); otherwise a seeded portfolio plus hill climbing.  The
    returned required_C is a certified lower bound on any valid C for b at
    this dimension.
    """
    if not b.points:
        raise DomainError("adversary needs a nonempty configuration")
    q = b.q
    size = q**n
    r = b.rank_aff
    if size <= 20 and (1 << size) <= max(budget, 1 << 16):
        counts = _sweep_hom_totals(b, n, backend=backend)
        best_c = -math.inf
        best_mask = -1
        for mask in range(1, (1 << size) - 1):
            a_size = mask.bit_count()
            req = _required_c_from_total(int(counts[mask]), a_size, size, r)
            if req > best_c + 1e-15 or (
                    abs(req - best_c) <= 1e-15 and _lex_key(mask) < _lex_key(best_mask)):
                best_c = req
                best_mask = mask
        witness = PointSet(q, n, best_mask)
        return SidorenkoVerdict("inconclusive", witness, margin(b, witness, best_c),
                                best_c, n, (1 << size) - 2,
                                note="exhaustive maximum of required_C")
    examined = 0
    best_c = -math.inf
    best = None
    for host in _portfolio_hosts(b, n, budget, seed):
        examined += 1
        req = required_C(b, host, backend=backend)
        if req > best_c:
            best_c, best = req, host
    # random-restart local search: flip single points greedily
    rng = np.random.Generator(np.random.Philox(key=seed, counter=1))
    work = 0
    for _ in range(4):
        bits = int.from_bytes(rng.bytes((size + 7) // 8), "little") & ((1 << size) - 1)
        cur = PointSet(q, n, bits or 1)
        cur_c = required_C(b, cur, backend=backend)
        improved = True
        while improved and work < budget:
            improved = False
            for p in range(size):
                cand = cur.without_point(p) if p in cur else cur.with_point(p)
                if not 0 < cand.size < size:
                    continue
                work += size**r
                req = required_C(b, cand, backend=backend)
                examined += 1
                if req > cur_c + 1e-12:
                    cur, cur_c, improved = cand, req, True
                    break
        if cur_c > best_c:
            best_c, best = cur_c, cur
    return SidorenkoVerdict("inconclusive", best,
                            margin(b, best, best_c) if best is not None else None,
                            best_c, n, examined, note="portfolio + local search")


# -- supersaturation and products ----------------------------------------------

@dataclass
class SupersatReport:
    status: str  # ok | violated | conditional
    conditional: bool
    host_size: int
    d_effective: Fraction | float
    instances: int
    min_slack: float
    bound_nonnegative: int
    note: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "conditional": self.conditional,
                "host_size": self.host_size, "d_effective": float(self.d_effective),
                "instances": self.instances, "min_slack": self.min_slack,
                "bound_nonnegative": self.bound_nonnegative, "note": self.note}


def _supersat_host_size(q: int, n: int, d, c, r) -> int:
    """ceil(D * q^((1 - 1/(C - r + 1)) n)) via high-precision evaluation."""
    import mpmath

    with mpmath.workdps(60):
        e = (1 - 1 / (mpmath.mpf(str(float(c))) - r + 1)) * n
        val = mpmath.mpf(str(float(d))) * mpmath.power(q, e)
        return int(mpmath.ceil(val - mpmath.mpf("1e-40")))


def supersaturation_check(b: AffineConfiguration, c, n: int, d,
                          samples: int = 100, seed: int = 0,
                          backend: str | None = None) -> SupersatReport:
    """Copy-count supersaturation at host size ceil(D q^((1-1/(C-r+1))n)).

    Requires b verified C-weakly Sidorenko at this n; when that exhaustive
    verification is infeasible the check still runs but is marked
    conditional.  For every tested host the copy count must strictly exceed
    (1 - q^(r-1)/D^(C-r+1)) alpha^C N^r / |Aut(b)| with D recomputed from
    the rounded host size.
    """
    q = b.q
    size = q**n
    r = b.rank_aff
    if float(c) <= r - 1:
        raise DomainError("supersaturation needs C > rank - 1 = %d" % (r - 1))
    conditional = False
    note = ""
    try:
        verdict = verify_exhaustive(b, c, n, backend=backend)
        if verdict.status != "verified":
            return SupersatReport("violated", False, 0, 0.0, 0, math.inf, 0,
                                  note="precondition failed: %s" % verdict.status)
    except BudgetError:
        conditional = True
        note = "exhaustive verification infeasible at n=%d; conditional" % n
    s = _supersat_host_size(q, n, d, c, r)
    if not 1 <= s <= size:
        raise DomainError("host size %d outside [1, %d]; adjust D" % (s, size))
    aut = hom.aut_order(b)
    is_int, ci = _as_exponent(c)
    exp_e = (ci if is_int else float(c)) - r + 1
    alpha = Fraction(s, size)
    # D recomputed from the integral host size: D^E = s^E * q^(-(E-1)n)
    if is_int:
        d_eff_pow = Fraction(s)**exp_e / Fraction(q)**((exp_e - 1) * n)
        bound = (1 - Fraction(q)**(r - 1) / d_eff_pow) * alpha**ci * size**r / aut
    else:
        d_eff_pow = float(s)**exp_e / float(q)**((exp_e - 1) * n)
        bound = (1.0 - float(q)**(r - 1) / d_eff_pow) * float(alpha)**float(c) * float(size)**r / aut
    hosts = _hosts_of_size(q, n, s, samples, seed)
    min_slack = math.inf
    nonneg = 0
    count = 0
    for a in hosts:
        count += 1
        copies = hom.copy_count(b, a, backend=backend)
        slack = copies - bound
        if float(slack) <= 0:
            return SupersatReport("violated", conditional, s, d_eff_pow, count,
                                  float(slack), nonneg,
                                  note="host %r at or below the bound" % a)
        if bound >= 0:
            nonneg += 1
            if copies < 1:
                return SupersatReport("violated", conditional, s, d_eff_pow, count,
                                      float(slack), nonneg,
                                      note="bound >= 0 but no copy present")
        min_slack = min(min_slack, float(slack))
    status = "ok" if not conditional else "conditional"
    return SupersatReport(status, conditional, s, d_eff_pow, count, min_slack,
                          nonneg, note=note)


def _hosts_of_size(q: int, n: int, s: int, samples: int, seed: int):
    size = q**n
    total = math.comb(size, s)
    if total <= max(samples, 200_000):
        for combo in combinations(range(size), s):
            yield PointSet.from_points(q, n, combo)
        return
    rng = np.random.Generator(np.random.Philox(key=seed))
    for _ in range(samples):
        picks = rng.choice(size, size=s, replace=False)
        yield PointSet.from_points(q, n, (int(p) for p in picks))


@dataclass
class ProductCheckReport:
    status: str  # ok | violated | conditional
    conditional: bool
    c_product: float
    instances: int
    min_margin: float
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "conditional": self.conditional,
                "c_product": self.c_product, "instances": self.instances,
                "min_margin": self.min_margin,
                "violations": [w.to_json() for w in self.violations]}


def product_sidorenko_check(b1: AffineConfiguration, c1,
                            b2: AffineConfiguration, c2, n: int,
                            samples: int = 64, seed: int = 0,
                            backend: str | None = None) -> ProductCheckReport:
    """Margins of b1 x b2 at exponent C1*C2 over a host portfolio.

    When the factors' constants were exhaustively verified at every
    dimension <= n the product inequality is a theorem; any observed
    violation is therefore a refutation artifact pointing at this
    implementation, and is returned for inspection rather than swallowed.
    """
    for c, b in ((c1, b1), (c2, b2)):
        if float(c) < b.rank_aff - 1:
            raise DomainError("C=%s below rank-1=%d is outside the meaningful range"
                              % (c, b.rank_aff - 1))
    prod = product(b1, b2)
    if isinstance(c1, (int, Fraction)) and isinstance(c2, (int, Fraction)):
        c = Fraction(c1) * Fraction(c2)
    else:
        c = float(c1) * float(c2)
    if float(c) < prod.rank_aff - 1:
        raise DomainError("product exponent %s below rank-1=%d is outside the"
                          " meaningful range" % (c, prod.rank_aff - 1))
    conditional = False
    for d in range(1, n + 1):
        try:
            v1 = verify_exhaustive(b1, c1, d, backend=backend)
            v2 = verify_exhaustive(b2, c2, d, backend=backend)
        except BudgetError:
            conditional = True
            continue
        if v1.status != "verified" or v2.status != "verified":
            return ProductCheckReport("violated", False, float(c), 0, math.inf,
                                      [v for v in (v1, v2) if v.status != "verified"])
    q = prod.q
    size = q**n
    tol = MARGIN_REL_TOL * float(size)**prod.rank_aff
    try:
        verdict = verify_exhaustive(prod, c, n, backend=backend)
        if verdict.status == "verified":
            return ProductCheckReport("ok" if not conditional else "conditional",
                                      conditional, float(c),
                                      verdict.subsets_examined, 0.0)
        return ProductCheckReport("violated", conditional, float(c),
                                  verdict.subsets_examined,
                                  float(verdict.margin), [verdict])
    except BudgetError:
        pass
    hosts = _portfolio_hosts(prod, n, budget=1 << 18, seed=seed)
    rng = np.random.Generator(np.random.Philox(key=seed, counter=7))
    for _ in range(samples):
        bits = int.from_bytes(rng.bytes((size + 7) // 8), "little") & ((1 << size) - 1)
        hosts.append(PointSet(q, n, bits))
    min_margin = math.inf
    violations = []
    count = 0
    for a in hosts:
        count += 1
        mg = margin(prod, a, c, backend=backend)
        fm = float(mg)
        min_margin = min(min_margin, fm)
        if fm < -tol:
            violations.append(SidorenkoVerdict("counterexample", a, mg,
                                               required_C(prod, a), n, count))
    status = "violated" if violations else ("conditional" if conditional else "ok")
    return ProductCheckReport(status, conditional, float(c), count, min_margin,
                              violations)

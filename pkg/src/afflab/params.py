"""Per-field Sidorenko constants sigma_q.

sigma_2 = 2 exactly.  sigma_3 is the line-supersaturation constant for F_3,
known only approximately; the default 13.901 (three decimals) can be
overridden with the AFFLAB_SIGMA3 environment variable.  Every report that
depends on it carries the configured value in its metadata.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .errors import DomainError

DEFAULT_SIGMA3 = Fraction("13.901")


def sigma3() -> Fraction:
    raw = os.environ.get("AFFLAB_SIGMA3", "").strip()
    if not raw:
        return DEFAULT_SIGMA3
    try:
        return Fraction(raw)
    except ValueError as exc:
        raise DomainError("AFFLAB_SIGMA3=%r is not a number" % raw) from exc


def sigma_value(q: int) -> Fraction:
    """Exact rational sigma_q (sigma_3 is the configured approximation)."""
    if q == 2:
        return Fraction(2)
    if q == 3:
        return sigma3()
    raise DomainError("sigma_q is only defined for q in {2, 3}, got %d" % q)

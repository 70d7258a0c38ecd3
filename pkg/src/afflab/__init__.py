"""Exact computation and search for affine configurations over F_q, q prime.

Subpackages split by concern:

  space      -- F_q^n arithmetic, bitset point sets, subspace enumeration,
                the subset invariants omega / omega_aff / omega_arrow
  config     -- affine configurations B (ranks, bases, products, span maps)
  hom        -- exact / Monte-Carlo affine homomorphism counting
  sidorenko  -- weakly-Sidorenko margins, exhaustive verification, adversaries
  extremal   -- affine extremal numbers by branch and bound, extraction
  ramsey     -- vector-space Ramsey numbers, Bose-Burton, m_q(t)
  bounds     -- closed-form bound evaluators and tower arithmetic
  oracle     -- slow reference implementations used as ground truth
  cli        -- command-line front end
"""

__version__ = "0.1.0"

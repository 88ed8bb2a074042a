"""Exact-rational engine for semisimple cohomological field theory computations.

Modules:
  frobenius    - Frobenius algebras, idempotents, topological field theory values.
  stablegraphs - stable graph enumeration and automorphisms.
  intersect    - psi and kappa intersection numbers on moduli of curves.
  raction      - R-matrix action on topological field theories via graph sums.
  product      - correlators of product theories with one R-dressed factor.
  fockvir      - truncated potentials, Virasoro operators, grading identities.
  cli          - command-line interface.
"""

__version__ = "0.1.0"

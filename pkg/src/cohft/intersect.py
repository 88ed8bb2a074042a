"""Exact psi and kappa intersection numbers on moduli spaces of curves.

Pure psi correlators <tau_{k_1} ... tau_{k_n}>_g are computed by a recursion on
the largest index together with the string and dilaton equations; the only
seeds are the three-point genus-zero value 1 and the one-point genus-one value
obtained by eliminating <tau_2 tau_0>_1 between the recursion and the string
equation.  A genus-zero closed form serves as an independent oracle.

Kappa classes enter through two identities only: forgetting one point pushes
psi^{a+1} at that point to kappa_a, and kappa_a on the space with one extra
point is the pullback of kappa_a plus psi^a at the extra point.  Products of
psi at positive powers kill the boundary corrections of pulled-back psi
classes, which makes both conversion directions exact finite sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import combinations
from math import factorial

from .caps import DEFAULT_CAPS, is_stable, require_stable
from .errors import CapExceeded, DimensionMismatch

ZERO = Fraction(0)
SEED_0_3 = Fraction(1)


@dataclass(frozen=True)
class PsiSpec:
    genus: int
    powers: tuple

    def __post_init__(self):
        require_stable(self.genus, len(self.powers))


@dataclass(frozen=True)
class MixedSpec:
    genus: int
    ancestor_powers: tuple
    extra_powers: tuple

    def __post_init__(self):
        require_stable(self.genus, len(self.ancestor_powers))
        if any(c < 2 for c in self.extra_powers):
            raise ValueError("extra powers must be at least 2")


@dataclass(frozen=True)
class KappaPoly:
    """Scalar combination of kappa monomials; a monomial is a sorted index tuple."""

    terms: tuple  # ((indices, coefficient), ...) sorted by indices

    @staticmethod
    def from_dict(d) -> "KappaPoly":
        merged = {}
        for k, v in d.items():
            key = tuple(sorted(k))
            merged[key] = merged.get(key, ZERO) + Fraction(v)
        items = tuple(sorted((k, v) for k, v in merged.items() if v != 0))
        return KappaPoly(items)

    def as_dict(self):
        return {k: v for k, v in self.terms}


def double_factorial(n: int) -> int:
    """(2k+1)!! style product; n = -1 gives 1."""
    if n < -1:
        raise ValueError("negative double factorial")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def genus0_closed_form(powers) -> Fraction:
    """(n-3)! / prod k_j! for genus-zero on-dimension insertions."""
    powers = tuple(int(k) for k in powers)
    n = len(powers)
    if n < 3 or sum(powers) != n - 3:
        raise DimensionMismatch(f"powers {powers} do not fit genus zero dimension {n - 3}")
    denom = 1
    for k in powers:
        denom *= factorial(k)
    return Fraction(factorial(n - 3), denom)


@cache
def _tau1_genus1() -> Fraction:
    # Eliminate v = <tau_2 tau_0>_1 between the largest-index recursion
    # (15 v = 3 x + s/2 with s the three-point seed) and the string
    # equation (v = x); the remaining linear equation fixes x.
    s = SEED_0_3
    return (s / 2) / (15 - 3)


@cache
def _psi(g: int, powers: tuple) -> Fraction:
    if not is_stable(g, len(powers)):
        return ZERO
    if any(k < 0 for k in powers):
        return ZERO
    n = len(powers)
    if sum(powers) != 3 * g - 3 + n:
        return ZERO
    powers = tuple(sorted(powers, reverse=True))
    if g == 0 and n == 3:
        return SEED_0_3
    if powers == (1,) and g == 1:
        return _tau1_genus1()
    if powers[-1] == 0:
        rest = powers[:-1]
        return sum((_psi(g, _replace(rest, j, rest[j] - 1)) for j in range(len(rest)) if rest[j] >= 1), ZERO)
    if powers[-1] == 1 and is_stable(g, n - 1):
        rest = powers[:-1]
        return (2 * g - 2 + (n - 1)) * _psi(g, rest)
    return _dvv(g, powers)


def _replace(powers, j, value):
    return powers[:j] + (value,) + powers[j + 1:]


def _dvv(g: int, powers: tuple) -> Fraction:
    """Largest-index recursion; powers sorted descending with k_0 >= 2."""
    k0, rest = powers[0], powers[1:]
    total = ZERO
    for j in range(len(rest)):
        kj = rest[j]
        coeff = Fraction(double_factorial(2 * k0 + 2 * kj - 1), double_factorial(2 * kj - 1))
        total += coeff * _psi(g, _replace(rest, j, k0 + kj - 1))
    half = ZERO
    for a in range(k0 - 1):
        b = k0 - 2 - a
        w = Fraction(double_factorial(2 * a + 1) * double_factorial(2 * b + 1))
        if g >= 1:
            half += w * _psi(g - 1, rest + (a, b))
        for g1 in range(g + 1):
            g2 = g - g1
            for size in range(len(rest) + 1):
                for idx in combinations(range(len(rest)), size):
                    chosen = tuple(rest[i] for i in idx)
                    others = tuple(rest[i] for i in range(len(rest)) if i not in idx)
                    if not is_stable(g1, len(chosen) + 1) or not is_stable(g2, len(others) + 1):
                        continue
                    half += w * _psi(g1, chosen + (a,)) * _psi(g2, others + (b,))
    total += half / 2
    return total / double_factorial(2 * k0 + 1)


def psi_correlator(spec: PsiSpec, caps=DEFAULT_CAPS) -> Fraction:
    """<tau_{k_1} ... tau_{k_n}>_g; zero off the dimension constraint."""
    g, powers = spec.genus, tuple(int(k) for k in spec.powers)
    caps.check_pair(g, len(powers), "psi_correlator")
    caps.check_degree(sum(powers), "psi_correlator")
    return _psi(g, tuple(sorted(powers, reverse=True)))


def kappa_pushforward(extra_powers) -> KappaPoly:
    """Forget the extra points carrying psi^{c_j} one at a time.

    State: list of (coefficient, kappa monomial) for the part already pushed
    down. At each step the monomial's kappa factors split into a pulled-back
    kappa or a psi power at the point being forgotten, and the accumulated psi
    power e pushes to kappa_{e-1}.
    """
    extra_powers = tuple(int(c) for c in extra_powers)
    if any(c < 1 for c in extra_powers):
        raise ValueError("extra powers must be at least 1")
    terms = {(): Fraction(1)}
    for c in reversed(extra_powers):
        new_terms = {}
        for mono, coeff in terms.items():
            for kept, psi_extra, ways in _comparison_splits(mono):
                e = c + psi_extra
                out = tuple(sorted(kept + (e - 1,)))
                new_terms[out] = new_terms.get(out, ZERO) + coeff * ways
        terms = new_terms
    return KappaPoly.from_dict(terms)


def _comparison_splits(mono):
    """Ways to split each kappa_b factor into kappa_b or psi^b at the new point.

    Yields (kept monomial, total psi power moved, multiplicity).
    """
    values = sorted(set(mono))
    counts = {v: mono.count(v) for v in values}

    def rec(i, kept, psi_extra, ways):
        if i == len(values):
            yield tuple(kept), psi_extra, ways
            return
        v = values[i]
        m = counts[v]
        for take in range(m + 1):
            yield from rec(
                i + 1,
                kept + [v] * (m - take),
                psi_extra + v * take,
                ways * _binomial(m, take),
            )

    yield from rec(0, [], 0, 1)


def _binomial(n, k):
    return factorial(n) // (factorial(k) * factorial(n - k))


@cache
def _psi_kappa(g: int, psi_powers: tuple, kappa_indices: tuple) -> Fraction:
    if not kappa_indices:
        return _psi(g, psi_powers)
    b, rest = kappa_indices[0], kappa_indices[1:]
    total = ZERO
    values = sorted(set(rest))
    counts = {v: rest.count(v) for v in values}

    def rec(i, remaining, moved, sign_ways):
        nonlocal total
        if i == len(values):
            new_psi = tuple(sorted(psi_powers + (b + 1 + moved,)))
            total += sign_ways * _psi_kappa(g, new_psi, tuple(remaining))
            return
        v = values[i]
        m = counts[v]
        for take in range(m + 1):
            rec(
                i + 1,
                remaining + [v] * (m - take),
                moved + v * take,
                sign_ways * ((-1) ** take) * _binomial(m, take),
            )

    rec(0, [], 0, Fraction(1))
    return total


def psi_kappa_integral(g: int, psi_powers, kappa_indices, caps=DEFAULT_CAPS) -> Fraction:
    """Integral of prod psi^{a_i} times prod kappa_{b_j} over the (g, n) space."""
    psi_powers = tuple(int(a) for a in psi_powers)
    kappa_indices = tuple(int(b) for b in kappa_indices)
    n = len(psi_powers)
    require_stable(g, n)
    if any(b < 0 for b in kappa_indices):
        raise ValueError("kappa indices must be nonnegative")
    caps.check_pair(g, n, "psi_kappa_integral")
    caps.check_degree(sum(psi_powers) + sum(kappa_indices), "psi_kappa_integral")
    if sum(psi_powers) + sum(kappa_indices) != 3 * g - 3 + n:
        return ZERO
    return _psi_kappa(g, tuple(sorted(psi_powers)), tuple(sorted(kappa_indices)))


def mixed_integral(spec: MixedSpec, caps=DEFAULT_CAPS) -> Fraction:
    """Integral of prod psi^{a_i} times the pushforward of the extra-point powers."""
    g = spec.genus
    ancestors = tuple(int(a) for a in spec.ancestor_powers)
    extras = tuple(int(c) for c in spec.extra_powers)
    n, m = len(ancestors), len(extras)
    if g > caps.g_max or n + m > caps.n_max:
        raise CapExceeded(f"(g={g}, n+m={n + m}) exceeds caps in mixed_integral")
    caps.check_degree(sum(ancestors) + sum(extras), "mixed_integral")
    if sum(ancestors) + sum(extras) - m != 3 * g - 3 + n:
        return ZERO
    total = ZERO
    for mono, coeff in kappa_pushforward(extras).terms:
        total += coeff * _psi_kappa(g, tuple(sorted(ancestors)), mono)
    return total

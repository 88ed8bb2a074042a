"""Frobenius algebras, idempotent decompositions, and topological field theory values.

Conventions.  A rank-d algebra is stored by its pairing matrix eta[a][b], its
structure tensor structure[a][b][c] (coefficient of basis_c in basis_a * basis_b),
and the coordinates of the unit.  Matrices act on column vectors.  The
decomposition into one-dimensional factors uses unnormalized idempotents e_i
with norms Delta_i = eta(e_i, e_i); genus-g values on pure idempotent inserts
are Delta_i^{1-g}, so nothing ever needs a square root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .caps import require_stable
from .errors import NotSemisimpleOverBaseField, UnstablePair
from .linalg import (
    ONE,
    ZERO,
    bilinear,
    charpoly,
    identity_matrix,
    mat_inverse,
    mat_mul,
    mat_sub,
    mat_vec,
    mat_scale,
    rational_roots,
    to_matrix,
    to_vector,
    transpose,
    vec_add,
    vec_scale,
    zero_vector,
)


@dataclass(frozen=True)
class FrobeniusData:
    dim: int
    pairing: tuple
    structure: tuple
    unit: tuple
    label: str = ""


@dataclass(frozen=True)
class IdempotentDecomposition:
    idempotents: tuple
    norms: tuple
    pairing: tuple
    unit: tuple
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.idempotents)


@dataclass(frozen=True)
class GradedTargetData:
    base: FrobeniusData
    mu: tuple
    rho: tuple


def make_frobenius(pairing, structure, unit, label="") -> FrobeniusData:
    pairing = to_matrix(pairing)
    structure = tuple(tuple(to_vector(col) for col in row) for row in structure)
    unit = to_vector(unit)
    return FrobeniusData(dim=len(unit), pairing=pairing, structure=structure, unit=unit, label=label)


def multiply(data: FrobeniusData, u, v):
    """Product of two vectors in the algebra."""
    out = list(zero_vector(data.dim))
    for a, ua in enumerate(u):
        if ua == 0:
            continue
        for b, vb in enumerate(v):
            if vb == 0:
                continue
            coeff = ua * vb
            for c, s in enumerate(data.structure[a][b]):
                if s != 0:
                    out[c] += coeff * s
    return tuple(out)


def mult_matrix(data: FrobeniusData, v):
    """Matrix of multiplication by v: column a holds v * basis_a."""
    cols = [multiply(data, v, tuple(ONE if i == a else ZERO for i in range(data.dim))) for a in range(data.dim)]
    return transpose(to_matrix(cols))


def validate_frobenius(data: FrobeniusData):
    """Check pairing, commutativity, associativity, unit, and compatibility."""
    from .validation import ValidationReport

    report = ValidationReport(label=data.label or "frobenius")
    d = data.dim
    sym = all(data.pairing[i][j] == data.pairing[j][i] for i in range(d) for j in range(d))
    report.add("pairing symmetric", sym)
    try:
        mat_inverse(data.pairing)
        report.add("pairing invertible", True)
    except ValueError:
        report.add("pairing invertible", False)
    comm = True
    witness = ""
    for a, b in iproduct(range(d), repeat=2):
        if data.structure[a][b] != data.structure[b][a]:
            comm, witness = False, f"({a},{b})"
            break
    report.add("product commutative", comm, witness)
    basis = identity_matrix(d)
    assoc = True
    witness = ""
    for a, b, c in iproduct(range(d), repeat=3):
        lhs = multiply(data, multiply(data, basis[a], basis[b]), basis[c])
        rhs = multiply(data, basis[a], multiply(data, basis[b], basis[c]))
        if lhs != rhs:
            assoc, witness = False, f"({a},{b},{c})"
            break
    report.add("product associative", assoc, witness)
    unit_ok = True
    witness = ""
    for a in range(d):
        if multiply(data, data.unit, basis[a]) != basis[a]:
            unit_ok, witness = False, f"({a},)"
            break
    report.add("unit acts as identity", unit_ok, witness)
    frob = True
    witness = ""
    for a, b, c in iproduct(range(d), repeat=3):
        lhs = bilinear(data.pairing, multiply(data, basis[a], basis[b]), basis[c])
        rhs = bilinear(data.pairing, basis[a], multiply(data, basis[b], basis[c]))
        if lhs != rhs:
            frob, witness = False, f"({a},{b},{c})"
            break
    report.add("pairing invariant under product", frob, witness)
    return report


def _semisimple_candidates(data: FrobeniusData, bound: int = 5):
    """Elements whose multiplication matrix might split the algebra."""
    basis = identity_matrix(data.dim)
    for v in basis:
        yield v
    staircase = tuple(Fraction(a + 1) for a in range(data.dim))
    yield staircase
    for k in range(1, bound + 1):
        for v in basis:
            yield vec_add(v, vec_scale(k, data.unit))
        yield vec_add(staircase, vec_scale(k, data.unit))
    for k in range(1, bound + 1):
        for a in range(data.dim):
            for b in range(a + 1, data.dim):
                yield vec_add(basis[a], vec_scale(k, basis[b]))


def idempotent_basis(data: FrobeniusData) -> IdempotentDecomposition:
    """Split the algebra into one-dimensional factors with rational idempotents."""
    d = data.dim
    for cand in _semisimple_candidates(data):
        m = mult_matrix(data, cand)
        roots = rational_roots(charpoly(m))
        if len(roots) != d or len(set(roots)) != d:
            continue
        idems = []
        for lam in roots:
            proj = identity_matrix(d)
            for other in roots:
                if other == lam:
                    continue
                factor = mat_scale(ONE / (lam - other), mat_sub(m, mat_scale(other, identity_matrix(d))))
                proj = mat_mul(proj, factor)
            idems.append(mat_vec(proj, data.unit))
        idems.sort()
        norms = tuple(bilinear(data.pairing, e, e) for e in idems)
        if any(n == 0 for n in norms):
            continue
        ok = all(
            multiply(data, idems[i], idems[j]) == (idems[i] if i == j else zero_vector(d))
            for i in range(d)
            for j in range(d)
        )
        total = data.unit
        for e in idems:
            total = tuple(x - y for x, y in zip(total, e))
        if ok and all(x == 0 for x in total):
            return IdempotentDecomposition(
                idempotents=tuple(idems),
                norms=norms,
                pairing=data.pairing,
                unit=data.unit,
                label=data.label,
            )
    raise NotSemisimpleOverBaseField(
        f"no rational idempotent decomposition found for {data.label or 'algebra'}"
    )


def idempotent_coordinates(dec: IdempotentDecomposition, v):
    """Coordinates of v along each idempotent: eta(v, e_i) / Delta_i."""
    return tuple(bilinear(dec.pairing, to_vector(v), e) / n for e, n in zip(dec.idempotents, dec.norms))


def tft_correlator(dec: IdempotentDecomposition, g: int, inserts) -> Fraction:
    """Genus-g value of the degree-zero theory on the given insertions."""
    n = len(inserts)
    require_stable(g, n)
    coords = [idempotent_coordinates(dec, v) for v in inserts]
    total = ZERO
    for i, delta in enumerate(dec.norms):
        term = delta ** (1 - g)
        for c in coords:
            term *= c[i]
            if term == 0:
                break
        total += term
    return total


def tensor_frobenius(a: FrobeniusData, b: FrobeniusData) -> FrobeniusData:
    """Tensor product algebra on the basis ordered as (i, j) -> i * dim_b + j."""
    da, db = a.dim, b.dim
    d = da * db
    pairing = [[a.pairing[i][k] * b.pairing[j][l] for k, l in iproduct(range(da), range(db))]
               for i, j in iproduct(range(da), range(db))]
    structure = [
        [
            [a.structure[i1][i2][i3] * b.structure[j1][j2][j3] for i3, j3 in iproduct(range(da), range(db))]
            for i2, j2 in iproduct(range(da), range(db))
        ]
        for i1, j1 in iproduct(range(da), range(db))
    ]
    unit = [a.unit[i] * b.unit[j] for i, j in iproduct(range(da), range(db))]
    label = f"({a.label} x {b.label})" if a.label or b.label else ""
    data = make_frobenius(pairing, structure, unit, label)
    assert data.dim == d
    return data


def tensor_vector(u, v):
    """Tensor of two coordinate vectors in the tensor basis ordering."""
    return tuple(x * y for x in u for y in v)


def point_algebra() -> FrobeniusData:
    return make_frobenius([[1]], [[[1]]], [1], label="point")


def npoints_algebra(n: int) -> FrobeniusData:
    """Diagonal product on n coordinates with the standard pairing."""
    pairing = identity_matrix(n)
    structure = [[[ONE if a == b == c else ZERO for c in range(n)] for b in range(n)] for a in range(n)]
    unit = [ONE] * n
    return make_frobenius(pairing, structure, unit, label=f"{n}points")


def projective_line_algebra() -> FrobeniusData:
    """Rank-2 algebra on basis (1, h) with h * h = 1 and pairing eta(1, h) = 1."""
    pairing = [[0, 1], [1, 0]]
    structure = [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
    ]
    return make_frobenius(pairing, structure, [1, 0], label="p1_q1")


def validate_graded(data: GradedTargetData):
    """Check the grading operator relations against the base pairing."""
    from .validation import ValidationReport

    report = ValidationReport(label=(data.base.label or "graded") + ":grading")
    mu, rho = to_matrix(data.mu), to_matrix(data.rho)
    d = data.base.dim
    eta = data.base.pairing
    comm = mat_sub(mat_sub(mat_mul(mu, rho), mat_mul(rho, mu)), rho)
    report.add("mu rho - rho mu = rho", all(x == 0 for row in comm for x in row))
    anti = True
    basis = identity_matrix(d)
    for i, j in iproduct(range(d), repeat=2):
        if bilinear(eta, mat_vec(mu, basis[i]), basis[j]) + bilinear(eta, basis[i], mat_vec(mu, basis[j])) != 0:
            anti = False
            break
    report.add("mu antisymmetric for the pairing", anti)
    power = rho
    nilpotent = False
    for _ in range(d):
        if all(x == 0 for row in power for x in row):
            nilpotent = True
            break
        power = mat_mul(power, rho)
    nilpotent = nilpotent or all(x == 0 for row in power for x in row)
    report.add("rho nilpotent", nilpotent)
    diag_half = all(
        (2 * mu[i][j]).denominator == 1 and (i == j or mu[i][j] == 0) for i in range(d) for j in range(d)
    )
    report.add("mu diagonal with half-integer entries", diag_half)
    return report

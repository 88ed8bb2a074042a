"""Dense exact linear algebra over Fraction.

Matrices are tuples of row tuples; vectors are tuples.  All entries are
Fractions.  Matrices act on column vectors: (M v)_i = sum_j M[i][j] v[j].
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

ZERO = Fraction(0)
ONE = Fraction(1)


def to_vector(entries):
    return tuple(Fraction(x) for x in entries)


def to_matrix(rows):
    mat = tuple(tuple(Fraction(x) for x in row) for row in rows)
    if mat and any(len(row) != len(mat[0]) for row in mat):
        raise ValueError("ragged matrix")
    return mat


def zero_vector(n):
    return (ZERO,) * n


def zero_matrix(n, m=None):
    m = n if m is None else m
    return tuple((ZERO,) * m for _ in range(n))


def identity_matrix(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c, v):
    c = Fraction(c)
    return tuple(c * a for a in v)


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb, strict=True)) for ra, rb in zip(a, b, strict=True))


def mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb, strict=True)) for ra, rb in zip(a, b, strict=True))


def mat_scale(c, a):
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_vec(a, v):
    return tuple(sum((x * y for x, y in zip(row, v, strict=True)), ZERO) for row in a)


def mat_mul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col, strict=True)), ZERO) for col in bt) for row in a)


def transpose(a):
    return tuple(zip(*a)) if a else ()


def dot(u, v):
    return sum((x * y for x, y in zip(u, v, strict=True)), ZERO)


def bilinear(eta, u, v):
    return dot(u, mat_vec(eta, v))


def is_zero_matrix(a):
    return all(x == 0 for row in a for x in row)


def mat_eq(a, b):
    return a == b


def rref(rows):
    """Row-reduce a list of row tuples; return (rows, pivot column list)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = ONE / rows[r][c]
        rows[r] = [inv * x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [tuple(row) for row in rows], pivots


def mat_inverse(a):
    """Invert a square matrix; raise ValueError when singular."""
    n = len(a)
    aug = [tuple(a[i]) + tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return tuple(row[n:] for row in red[:n])


def solve_square(a, b):
    """Solve a x = b for square invertible a."""
    return mat_vec(mat_inverse(a), b)


def kernel_basis(a):
    """Return a basis (tuple of vectors) of the null space of a."""
    if not a:
        return ()
    n = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * n
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return tuple(basis)


def charpoly(a):
    """Characteristic polynomial coefficients (c_0 .. c_n), det(xI - A) = sum c_k x^k."""
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = zero_matrix(n)
    c = ONE
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        m = tuple(tuple(m[i][j] + (c if i == j else ZERO) for j in range(n)) for i in range(n))
        am = mat_mul(a, m)
        c = -sum((am[i][i] for i in range(n)), ZERO) / k
        coeffs[n - k] = c
    return tuple(coeffs)


def poly_eval(coeffs, x):
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs):
    """All rational roots (with multiplicity) of sum c_k x^k, c_k Fractions."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // _gcd(denom, c.denominator)
    ints = [int(c * denom) for c in coeffs]
    roots = []
    # Factor out x^k first.
    while ints[0] == 0:
        roots.append(ZERO)
        ints = ints[1:]
    while len(ints) > 1:
        root = _find_rational_root(ints)
        if root is None:
            break
        roots.append(root)
        ints = _deflate(ints, root)
    return roots


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n):
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _find_rational_root(ints):
    lead, const = ints[-1], ints[0]
    if const == 0:
        return ZERO
    for p, q in iproduct(_divisors(const), _divisors(lead)):
        for sign in (1, -1):
            cand = Fraction(sign * p, q)
            if poly_eval([Fraction(c) for c in ints], cand) == 0:
                return cand
    return None


def _deflate(ints, root):
    """Divide the integer-coefficient polynomial by (x - root) exactly."""
    coeffs = [Fraction(c) for c in ints]
    out = [ZERO] * (len(coeffs) - 1)
    acc = ZERO
    for k in range(len(coeffs) - 1, 0, -1):
        acc = coeffs[k] + acc * root
        out[k - 1] = acc
    rem = coeffs[0] + acc * root
    if rem != 0:
        raise ValueError("not a root")
    denom = 1
    for c in out:
        denom = denom * c.denominator // _gcd(denom, c.denominator)
    return [int(c * denom) for c in out]


def eta_adjoint(m, eta, eta_inv):
    """Adjoint with respect to the pairing: eta^{-1} m^T eta."""
    return mat_mul(eta_inv, mat_mul(transpose(m), eta))

"""R-matrix series, edge series, translation, and the graph-sum correlator."""

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import pytest

from cohft.caps import Caps
from cohft.errors import CapExceeded, NonvanishingLowOrder, NotDivisible
from cohft.frobenius import (
    idempotent_basis,
    npoints_algebra,
    point_algebra,
    projective_line_algebra,
    tft_correlator,
)
from cohft.intersect import PsiSpec, psi_correlator
from cohft.linalg import (
    identity_matrix,
    mat_inverse,
    mat_mul,
    mat_scale,
    mat_vec,
    to_matrix,
    transpose,
    zero_matrix,
)
from cohft.raction import (
    RMatrix,
    edge_series,
    identity_rmatrix,
    invert,
    make_rmatrix,
    raction_correlator,
    random_symplectic,
    series_multiply,
    translation,
    validate_symplectic,
)

F = Fraction
CAPS = Caps(g_max=2, n_max=8, degree_max=40, graph_g_max=2, graph_n_max=8)


def rank1_exp(r, order=9):
    """Rank-1 R(z) = exp(r z) truncated."""
    return make_rmatrix([[[F(r) ** k / factorial(k)]] for k in range(order + 1)])


def sampled(dim, order, seed):
    data = npoints_algebra(dim)
    dec = idempotent_basis(data)
    rng = random.Random(seed)
    return data, dec, random_symplectic(dim, data.pairing, order, rng)


def test_rmatrix_requires_identity_head():
    with pytest.raises(ValueError):
        make_rmatrix([[[2]]])
    with pytest.raises(ValueError):
        make_rmatrix([[[1, 0], [0, 1]], [[1], [2]]])


def test_validate_identity_passes():
    data = npoints_algebra(2)
    assert validate_symplectic(identity_rmatrix(2, 3), data.pairing).ok


def test_validate_odd_log_exponential():
    # rank-1, eta(1,1) = 1, R = exp(z + z^3) to order 4: log is odd, so symplectic.
    order = 4
    coeffs = [F(0)] * (order + 1)
    coeffs[0] = F(1)
    a = [F(0), F(1), F(0), F(1), F(0)]
    power = list(coeffs)
    for j in range(1, order + 1):
        power = [sum(power[i] * a[k - i] for i in range(k + 1)) for k in range(order + 1)]
        for k in range(order + 1):
            coeffs[k] += power[k] / factorial(j)
    r = make_rmatrix([[[c]] for c in coeffs])
    assert validate_symplectic(r, [[1]]).ok


def test_validate_non_skew_first_order_fails():
    data = npoints_algebra(2)
    r = make_rmatrix([identity_matrix(2), [[1, 1], [0, 1]]])
    report = validate_symplectic(r, data.pairing)
    assert not report.ok
    assert any("order 1" in c.name and not c.passed for c in report.checks)


def test_invert_identity():
    r = identity_rmatrix(3, 4)
    assert invert(r) == tuple([identity_matrix(3)] + [zero_matrix(3)] * 4)


def test_invert_geometric_series():
    r1 = to_matrix([[0, 2], [1, 1]])
    order = 5
    mats = [identity_matrix(2), r1] + [zero_matrix(2)] * (order - 1)
    inv = invert(make_rmatrix(mats))
    power = identity_matrix(2)
    for k in range(order + 1):
        assert inv[k] == mat_scale(F(-1) ** k, power)
        power = mat_mul(power, r1)


def test_invert_composes_to_identity():
    _, _, r = sampled(3, 4, seed=2)
    product = series_multiply(r.coefficients, invert(r), r.order)
    assert product[0] == identity_matrix(3)
    assert all(m == zero_matrix(3) for m in product[1:])


def test_inverse_is_adjoint_at_minus_z():
    data, _, r = sampled(2, 4, seed=3)
    eta = to_matrix(data.pairing)
    eta_inv = mat_inverse(eta)
    inv = invert(r)
    for k in range(r.order + 1):
        adjoint = mat_mul(eta_inv, mat_mul(transpose(r.coefficients[k]), eta))
        assert inv[k] == mat_scale(F(-1) ** k, adjoint)


def test_translation_identity_is_zero():
    assert translation(identity_rmatrix(2, 0), (1, 1)) == {}
    assert all(
        all(x == 0 for x in v) for v in translation(identity_rmatrix(2, 3), (1, 1)).values()
    )


def test_translation_first_order():
    # R = Id + R_1 z carried to K = 2: T_2 = R_1(unit), T_3 = -R_1^2(unit).
    r1 = to_matrix([[1, 2], [0, 1]])
    r = make_rmatrix([identity_matrix(2), r1, zero_matrix(2)])
    unit = (F(1), F(1))
    t = translation(r, unit)
    assert t[2] == mat_vec(r1, unit)
    assert t[3] == mat_vec(mat_scale(F(-1), mat_mul(r1, r1)), unit)


def test_translation_rank1_exponential():
    t = translation(rank1_exp(F(5, 7), order=3), (1,))
    assert t[2] == (F(5, 7),)


@dataclass(frozen=True)
class _BrokenHead:
    coefficients: tuple
    dim: int
    order: int


def test_translation_guards_low_order():
    broken = _BrokenHead((to_matrix([[2]]), to_matrix([[1]])), 1, 1)
    with pytest.raises(NonvanishingLowOrder):
        translation(broken, (1,))


def test_edge_series_identity_empty():
    assert edge_series(identity_rmatrix(2, 0), npoints_algebra(2).pairing) == {}
    assert all(
        m == zero_matrix(2)
        for m in edge_series(identity_rmatrix(2, 3), npoints_algebra(2).pairing).values()
    )


def test_edge_series_leading_coefficient():
    for dim, seed in [(2, 5), (3, 6)]:
        data, _, r = sampled(dim, 4, seed)
        e = edge_series(r, data.pairing)
        assert e[(0, 0)] == mat_mul(r.coefficients[1], mat_inverse(to_matrix(data.pairing)))


def test_edge_series_symmetry():
    for dim, seed in [(2, 7), (3, 8)]:
        data, _, r = sampled(dim, 4, seed)
        e = edge_series(r, data.pairing)
        for (k, l), m in e.items():
            assert m == transpose(e[(l, k)])


def test_edge_series_rejects_non_symplectic():
    data = npoints_algebra(2)
    bad = make_rmatrix([identity_matrix(2), [[1, 1], [0, 1]]])
    with pytest.raises(NotDivisible):
        edge_series(bad, data.pairing)


def test_random_symplectic_samples_pass():
    for dim in (1, 2, 3):
        data = npoints_algebra(dim)
        for seed in range(4):
            rng = random.Random(seed)
            r = random_symplectic(dim, data.pairing, 4, rng)
            assert validate_symplectic(r, data.pairing).ok


def test_identity_action_factorizes():
    # R = Id leaves only the smooth graph: theory value times psi integral.
    for dim in (1, 2, 3):
        dec = idempotent_basis(npoints_algebra(dim))
        rid = identity_rmatrix(dim, 4)
        rng = random.Random(dim)
        for g, powers in [(0, (1, 0, 0, 0)), (1, (1,)), (1, (0, 2)), (2, (4,)), (2, (3, 2))]:
            vectors = [tuple(F(rng.randint(-3, 3)) for _ in range(dim)) for _ in powers]
            got = raction_correlator(dec, rid, g, list(zip(vectors, powers)), caps=CAPS)
            expect = tft_correlator(dec, g, vectors) * psi_correlator(
                PsiSpec(g, tuple(powers)), caps=CAPS
            )
            assert got == expect


def test_identity_action_on_projective_line_algebra():
    dec = idempotent_basis(projective_line_algebra())
    rid = identity_rmatrix(2, 2)
    h = (F(0), F(1))
    got = raction_correlator(dec, rid, 1, [(h, 1)], caps=CAPS)
    assert got == tft_correlator(dec, 1, [h]) * F(1, 24)


def test_rank1_exponential_one_point_genus_one():
    # Frozen hand value over the two genus-1 graphs: smooth-vertex terms cancel
    # (-r/24 from the order-1 leg against +r/24 from the T-leg) and the
    # self-edge graph contributes E_00 / |Aut| = r/2.
    for r_val in (F(1), F(-2), F(3, 5)):
        dec = idempotent_basis(point_algebra())
        got = raction_correlator(dec, rank1_exp(r_val), 1, [((F(1),), 0)], caps=CAPS)
        assert got == r_val / 2


def test_rank1_exponential_four_point_genus_zero():
    # Frozen hand value: smooth-vertex leg corrections give -4r, the T-leg
    # gives +r, and the three two-vertex graphs give +3r; the total vanishes,
    # as the string equation forces.  Affine in r with zero coefficients.
    dec = idempotent_basis(point_algebra())
    one = ((F(1),), 0)
    for r_val in (F(0), F(1), F(2), F(-1, 3)):
        assert raction_correlator(dec, rank1_exp(r_val), 0, [one] * 4, caps=CAPS) == 0


def test_pairing_normalization_three_point():
    for dim, seed in [(2, 9), (3, 10)]:
        data, dec, r = sampled(dim, 4, seed)
        unit = tuple(data.unit)
        basis = identity_matrix(dim)
        for a in range(dim):
            for b in range(dim):
                got = raction_correlator(
                    dec, r, 0, [(basis[a], 0), (basis[b], 0), (unit, 0)], caps=CAPS
                )
                assert got == data.pairing[a][b]


def _string_residual(dec, r, unit, g, rest):
    lhs = raction_correlator(dec, r, g, [(unit, 0)] + rest, caps=CAPS)
    rhs = F(0)
    for j, (vec, d) in enumerate(rest):
        if d >= 1:
            rhs += raction_correlator(dec, r, g, rest[:j] + [(vec, d - 1)] + rest[j + 1 :], caps=CAPS)
    return lhs - rhs


def _dilaton_residual(dec, r, unit, g, rest):
    lhs = raction_correlator(dec, r, g, [(unit, 1)] + rest, caps=CAPS)
    rhs = (2 * g - 2 + len(rest)) * raction_correlator(dec, r, g, rest, caps=CAPS)
    return lhs - rhs


def test_string_and_dilaton_within_symplectic_weight():
    # A truncated R determines correlators only up to total series weight K,
    # so the axiom checks run on configurations with 3g-3+n-sum(d) <= K.
    for dim, seed in [(2, 21), (3, 22)]:
        data, dec, r = sampled(dim, 4, seed)
        unit = tuple(data.unit)
        rng = random.Random(seed + 50)
        vecs = [tuple(F(rng.randint(-3, 3)) for _ in range(dim)) for _ in range(3)]
        string_cases = [
            (0, [(vecs[0], 1), (vecs[1], 0), (vecs[2], 0)]),
            (1, [(vecs[0], 0), (vecs[1], 0)]),
            (2, [(vecs[0], 1)]),
            (2, [(vecs[1], 1), (vecs[2], 1)]),
        ]
        for g, rest in string_cases:
            assert _string_residual(dec, r, unit, g, rest) == 0
        dilaton_cases = [
            (0, [(vecs[0], 0), (vecs[1], 0), (vecs[2], 0)]),
            (1, [(vecs[0], 1), (vecs[1], 0)]),
            (2, [(vecs[2], 1)]),
        ]
        for g, rest in dilaton_cases:
            assert _dilaton_residual(dec, r, unit, g, rest) == 0


def test_string_fails_beyond_symplectic_weight():
    # Negative control: at weight 3g-3+n = 5 > K = 4 the truncated series
    # no longer determines the correlator and the identity must break.
    data, dec, r = sampled(2, 4, seed=42)
    unit = tuple(data.unit)
    rng = random.Random(7)
    v = tuple(F(rng.randint(-3, 3)) for _ in range(2))
    assert _string_residual(dec, r, unit, 2, [(v, 0)]) != 0


def test_linearity_in_inserts():
    data, dec, r = sampled(2, 3, seed=13)
    rng = random.Random(99)
    u = tuple(F(rng.randint(-3, 3)) for _ in range(2))
    v = tuple(F(rng.randint(-3, 3)) for _ in range(2))
    w = tuple(F(rng.randint(-3, 3)) for _ in range(2))
    combo = tuple(3 * a - 2 * b for a, b in zip(u, v))
    for g, d in [(0, 1), (1, 0), (1, 2)]:
        tail = [(w, 0), (w, d)]
        full = raction_correlator(dec, r, g, [(combo, d)] + tail, caps=CAPS)
        left = raction_correlator(dec, r, g, [(u, d)] + tail, caps=CAPS)
        right = raction_correlator(dec, r, g, [(v, d)] + tail, caps=CAPS)
        assert full == 3 * left - 2 * right


def test_trace_breakdown_sums_to_total():
    data, dec, r = sampled(2, 4, seed=17)
    rng = random.Random(3)
    v = tuple(F(rng.randint(-3, 3)) for _ in range(2))
    trace = []
    total = raction_correlator(dec, r, 1, [(v, 0), (v, 1)], caps=CAPS, trace=trace)
    assert sum(entry["contribution"] for entry in trace) == total
    # smooth, self-loop, bridge, two-vertex cycle, and loop-plus-bridge
    assert len(trace) == 5
    assert all(entry["automorphisms"] >= 1 for entry in trace)


def test_caps_enforced():
    dec = idempotent_basis(point_algebra())
    with pytest.raises(CapExceeded):
        raction_correlator(dec, rank1_exp(1), 3, [((F(1),), 0)], caps=CAPS)

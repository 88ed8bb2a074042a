"""R-matrix action on a semisimple topological field theory.

An R-matrix is a formal matrix power series Id + R_1 z + ... + R_K z^K that is
symplectic for the pairing: R(z) R*(-z) = Id through order K.  Acting on a
semisimple degree-zero theory it produces correlators through a sum over
stable graphs: legs carry the inverse series, edges carry the divided
bivector series, and vertices absorb a translation tail whose psi power is at
least two.  Truncation is aligned by symplectic weight: a leg coefficient at
order k spends k, a translation component at psi power c spends c - 1, and an
edge coefficient at (k, l) spends k + l + 1, so every series is kept exactly
up to weight K and the axiom identities close order by order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .caps import DEFAULT_CAPS
from .errors import NonvanishingLowOrder, NotDivisible
from .frobenius import IdempotentDecomposition, idempotent_coordinates
from .intersect import MixedSpec, mixed_integral
from .linalg import (
    eta_adjoint,
    identity_matrix,
    mat_add,
    mat_eq,
    mat_inverse,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    to_matrix,
    to_vector,
    transpose,
    vec_scale,
    zero_matrix,
)
from .validation import ValidationReport

ZERO = Fraction(0)
MINUS_ONE = Fraction(-1)


@dataclass(frozen=True)
class RMatrix:
    """Coefficients R_0..R_K with R_0 the identity."""

    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("empty coefficient list")
        dim = len(self.coefficients[0])
        if any(len(m) != dim or any(len(row) != dim for row in m) for m in self.coefficients):
            raise ValueError("coefficients must be square matrices of one size")
        if not mat_eq(self.coefficients[0], identity_matrix(dim)):
            raise ValueError("zeroth coefficient must be the identity")

    @property
    def dim(self) -> int:
        return len(self.coefficients[0])

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1


def make_rmatrix(mats) -> RMatrix:
    return RMatrix(tuple(to_matrix(m) for m in mats))


def identity_rmatrix(dim: int, order: int = 0) -> RMatrix:
    return RMatrix((identity_matrix(dim),) + tuple(zero_matrix(dim) for _ in range(order)))


def series_coefficient(series, k):
    if 0 <= k < len(series):
        return series[k]
    return zero_matrix(len(series[0]))


def series_multiply(a, b, order):
    """Coefficients of the product of two matrix power series."""
    dim = len(a[0])
    out = []
    for k in range(order + 1):
        acc = zero_matrix(dim)
        for i in range(k + 1):
            acc = mat_add(acc, mat_mul(series_coefficient(a, i), series_coefficient(b, k - i)))
        out.append(acc)
    return tuple(out)


def invert(r: RMatrix):
    """Formal inverse series A = R^{-1}, to the same order."""
    head = mat_inverse(r.coefficients[0])
    out = [head]
    for k in range(1, r.order + 1):
        acc = zero_matrix(r.dim)
        for j in range(1, k + 1):
            acc = mat_add(acc, mat_mul(r.coefficients[j], out[k - j]))
        out.append(mat_scale(MINUS_ONE, mat_mul(head, acc)))
    return tuple(out)


def validate_symplectic(r: RMatrix, pairing) -> ValidationReport:
    """Check R(z) R*(-z) = Id order by order, plus the inverse identity."""
    pairing = to_matrix(pairing)
    eta_inv = mat_inverse(pairing)
    report = ValidationReport(label="rmatrix")
    inverse = invert(r)
    for k in range(1, r.order + 1):
        acc = zero_matrix(r.dim)
        for i in range(k + 1):
            j = k - i
            term = mat_mul(r.coefficients[i], eta_adjoint(r.coefficients[j], pairing, eta_inv))
            if j % 2 == 1:
                term = mat_scale(MINUS_ONE, term)
            acc = mat_add(acc, term)
        ok = all(x == 0 for row in acc for x in row)
        report.add(f"symplectic at order {k}", ok, "" if ok else f"residual {acc}")
        adj = eta_adjoint(r.coefficients[k], pairing, eta_inv)
        if k % 2 == 1:
            adj = mat_scale(MINUS_ONE, adj)
        ok_inv = mat_eq(inverse[k], adj)
        report.add(
            f"inverse matches adjoint at minus z, order {k}",
            ok_inv,
            "" if ok_inv else f"difference {mat_sub(inverse[k], adj)}",
        )
    return report


def translation(r: RMatrix, unit):
    """Components T_c = -A_{c-1}(unit) for 2 <= c <= K+1.

    The orders z^0 and z^1 must cancel between z * unit and z * A(z)(unit);
    a failure there means A_0 does not fix the unit and is reported rather
    than silently dropped.
    """
    unit = to_vector(unit)
    inverse = invert(r)
    if mat_vec(inverse[0], unit) != unit:
        raise NonvanishingLowOrder("translation series keeps a z^1 component")
    return {c: vec_scale(MINUS_ONE, mat_vec(inverse[c - 1], unit)) for c in range(2, r.order + 2)}


def edge_series(r: RMatrix, pairing):
    """Divide the edge numerator by the sum of the two cotangent classes.

    The numerator coefficient at (k, l) is -A_k eta^{-1} A_l^t away from
    (0, 0), and zero at (0, 0).  Division runs along anti-diagonals; the
    leftover end condition of each anti-diagonal is the symplectic identity
    at that order, so a failure raises NotDivisible.
    """
    pairing = to_matrix(pairing)
    eta_inv = mat_inverse(pairing)
    inverse = invert(r)
    dim = r.dim

    def numerator(k, l):
        if k == 0 and l == 0:
            return zero_matrix(dim)
        return mat_scale(MINUS_ONE, mat_mul(mat_mul(inverse[k], eta_inv), transpose(inverse[l])))

    out = {}
    for s in range(r.order):
        prev = numerator(s + 1, 0)
        out[(s, 0)] = prev
        for k in range(s, 0, -1):
            prev = mat_sub(numerator(k, s + 1 - k), prev)
            out[(k - 1, s + 1 - k)] = prev
        if not mat_eq(numerator(0, s + 1), prev):
            raise NotDivisible(f"edge numerator not divisible at anti-diagonal {s + 1}")
    return out


def random_symplectic(dim, pairing, order, rng) -> RMatrix:
    """Exponential of a random a(z) with a_k + (-1)^k a_k^{*,eta} = 0."""
    pairing = to_matrix(pairing)
    eta_inv = mat_inverse(pairing)
    a = [zero_matrix(dim)]
    for k in range(1, order + 1):
        m = tuple(tuple(Fraction(rng.randint(-2, 2)) for _ in range(dim)) for _ in range(dim))
        adj = eta_adjoint(m, pairing, eta_inv)
        if k % 2 == 1:
            part = mat_scale(Fraction(1, 2), mat_add(m, adj))
        else:
            part = mat_scale(Fraction(1, 2), mat_sub(m, adj))
        a.append(part)
    series = [identity_matrix(dim)] + [zero_matrix(dim)] * order
    power = tuple(series)
    a_series = tuple(a)
    for j in range(1, order + 1):
        power = series_multiply(power, a_series, order)
        series = [
            mat_add(series[k], mat_scale(Fraction(1, factorial(j)), power[k]))
            for k in range(order + 1)
        ]
    return RMatrix(tuple(series))


def _partitions(total, max_part, max_parts):
    """Partitions of total into at most max_parts parts, each in 1..max_part."""
    if total == 0:
        yield ()
        return
    if max_parts == 0 or max_part < 1:
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first, max_parts - 1):
            yield (first,) + rest


def raction_correlator(dec: IdempotentDecomposition, r: RMatrix, g, inserts, caps=DEFAULT_CAPS, trace=None) -> Fraction:
    """Correlator of the transformed theory on (vector, psi power) insertions.

    When trace is a list, one entry per stable graph is appended with the
    graph's combinatorial encoding, automorphism order, and contribution.
    """
    from .stablegraphs import automorphism_order, enumerate_graphs

    n = len(inserts)
    caps.check_pair(g, n, "raction_correlator")
    dim = dec.dim
    norms = tuple(Fraction(x) for x in dec.norms)
    basis = identity_matrix(dim)
    coord_rows = transpose(tuple(idempotent_coordinates(dec, basis[a]) for a in range(dim)))

    inverse = invert(r)
    t_series = translation(r, dec.unit)
    edges_raw = edge_series(r, dec.pairing)

    def coords(vector):
        return tuple(
            sum((coord_rows[i][a] * vector[a] for a in range(dim)), ZERO) for i in range(dim)
        )

    inserts = tuple((to_vector(v), int(d)) for v, d in inserts)
    leg_sector = {
        (a, k): coords(mat_vec(inverse[k], vec))
        for a, (vec, _) in enumerate(inserts)
        for k in range(r.order + 1)
    }
    t_sector = {c: coords(v) for c, v in t_series.items()}
    edge_sector = {
        kl: tuple(
            tuple(
                sum(
                    (coord_rows[i][a] * m[a][b] * coord_rows[j][b] for a in range(dim) for b in range(dim)),
                    ZERO,
                )
                for j in range(dim)
            )
            for i in range(dim)
        )
        for kl, m in edges_raw.items()
    }

    inner_caps = caps.with_(n_max=max(caps.n_max, 32), degree_max=max(caps.degree_max, 64))
    mixed_cache = {}

    def vertex_integral(gv, powers, extras):
        key = (gv, tuple(sorted(powers)), extras)
        if key not in mixed_cache:
            mixed_cache[key] = mixed_integral(MixedSpec(gv, key[1], extras), caps=inner_caps)
        return mixed_cache[key]

    graph_caps = caps.with_(
        graph_g_max=max(caps.graph_g_max, g), graph_n_max=max(caps.graph_n_max, n)
    )
    total = ZERO
    for graph in enumerate_graphs(g, n, caps=graph_caps).graphs:
        nv = graph.n_vertices
        legs_at = [[] for _ in range(nv)]
        for h, marking in graph.legs:
            legs_at[graph.half_edge_vertex[h]].append(marking - 1)
        edge_list = tuple(
            (graph.half_edge_vertex[h1], graph.half_edge_vertex[h2]) for h1, h2 in graph.edges()
        )
        capacity = []
        feasible = True
        for v in range(nv):
            cap = 3 * graph.vertices[v] - 3 + graph.vertex_degree(v)
            cap -= sum(inserts[a][1] for a in legs_at[v])
            if cap < 0:
                feasible = False
            capacity.append(cap)

        leg_slots = tuple((v, a) for v in range(nv) for a in legs_at[v])
        graph_total = ZERO

        def assignment_value(leg_choice, edge_choice, remaining):
            factors = []
            for v in range(nv):
                gv = graph.vertices[v]
                powers = [k + inserts[a][1] for (vv, a), k in zip(leg_slots, leg_choice) if vv == v]
                for (u, w), (k, l) in zip(edge_list, edge_choice):
                    if u == v:
                        powers.append(k)
                    if w == v:
                        powers.append(l)
                per_sector = [ZERO] * dim
                for lam in _partitions(remaining[v], r.order, caps.translation_legs_max):
                    extras = tuple(p + 1 for p in lam)
                    integral = vertex_integral(gv, tuple(powers), extras)
                    if integral == 0:
                        continue
                    weight = Fraction(1)
                    for part in set(lam):
                        weight /= factorial(lam.count(part))
                    for i in range(dim):
                        term = integral * weight
                        for p in lam:
                            term *= t_sector[p + 1][i]
                        per_sector[i] += term
                for i in range(dim):
                    per_sector[i] *= norms[i] ** (1 - gv)
                for (vv, a), k in zip(leg_slots, leg_choice):
                    if vv == v:
                        for i in range(dim):
                            per_sector[i] *= leg_sector[(a, k)][i]
                factors.append(per_sector)

            acc = ZERO
            assignment = [0] * nv

            def rec(v):
                nonlocal acc
                if v == nv:
                    term = Fraction(1)
                    for u in range(nv):
                        term *= factors[u][assignment[u]]
                        if term == 0:
                            return
                    for (u, w), (k, l) in zip(edge_list, edge_choice):
                        term *= edge_sector[(k, l)][assignment[u]][assignment[w]]
                        if term == 0:
                            return
                    acc += term
                    return
                for i in range(dim):
                    assignment[v] = i
                    rec(v + 1)

            rec(0)
            return acc

        def scan_edges(e_idx, edge_choice, remaining):
            nonlocal graph_total
            if e_idx == len(edge_list):
                graph_total += assignment_value(tuple(leg_choice), tuple(edge_choice), remaining)
                return
            u, w = edge_list[e_idx]
            for k in range(r.order):
                for l in range(r.order - k):
                    if u == w:
                        if k + l > remaining[u]:
                            continue
                    elif k > remaining[u] or l > remaining[w]:
                        continue
                    remaining[u] -= k
                    remaining[w] -= l
                    edge_choice.append((k, l))
                    scan_edges(e_idx + 1, edge_choice, remaining)
                    edge_choice.pop()
                    remaining[u] += k
                    remaining[w] += l

        def scan_legs(slot_idx, remaining):
            if slot_idx == len(leg_slots):
                scan_edges(0, [], remaining)
                return
            v, _ = leg_slots[slot_idx]
            for k in range(min(r.order, remaining[v]) + 1):
                remaining[v] -= k
                leg_choice.append(k)
                scan_legs(slot_idx + 1, remaining)
                leg_choice.pop()
                remaining[v] += k

        leg_choice = []
        if feasible:
            scan_legs(0, list(capacity))
        aut = automorphism_order(graph)
        contribution = graph_total / aut
        if trace is not None:
            comb = graph.comb()
            trace.append(
                {
                    "vertex_genera": list(comb.genus),
                    "marking_vertex": list(comb.marking_vertex),
                    "edges": [list(e) for e in comb.edges],
                    "automorphisms": aut,
                    "contribution": contribution,
                }
            )
        total += contribution
    return total

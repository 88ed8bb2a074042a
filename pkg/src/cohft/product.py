"""Tensor-factor correlators: one exact correlator table times a transformed theory.

The combined theory lives on a tensor product of state spaces.  One factor is
given by an exact table of decorated correlators (psi powers and kappa classes
at each entry); the other factor is a semisimple degree-zero theory moved by an
R-matrix.  Because the R-matrix acts as the identity on the table factor, every
graph term factors: edges carry the table factor's inverse pairing as a static
bivector, legs pass their table-factor vector straight through, and translation
legs carry the table factor's unit, which the forgetful pushforward converts to
kappa decorations on the table lookup.  For a rank-one table factor the lookup
collapses to the pure psi-kappa integral and the sum reproduces the plain
R-matrix correlator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial

from .caps import Caps, DEFAULT_CAPS, is_stable
from .errors import CapExceeded, DimensionMismatch, MissingTableEntry
from .frobenius import IdempotentDecomposition, idempotent_coordinates
from .intersect import kappa_pushforward, psi_kappa_integral
from .linalg import (
    identity_matrix,
    mat_inverse,
    mat_vec,
    to_matrix,
    to_vector,
    transpose,
)
from .raction import RMatrix, _partitions, edge_series, invert, translation
from .validation import ValidationReport

ZERO = Fraction(0)
ONE = Fraction(1)

WIDE_TABLE_CAPS = Caps(g_max=4, n_max=40, degree_max=80, graph_g_max=2, graph_n_max=6)


def table_key(genus, pairs, kappas):
    """Canonical table key: sorted (index, power) pairs and sorted kappa indices."""
    return (
        int(genus),
        tuple(sorted((int(a), int(p)) for a, p in pairs)),
        tuple(sorted(int(b) for b in kappas)),
    )


@dataclass(frozen=True)
class ExplicitTable:
    """User-supplied correlator table with its pairing and unit."""

    entries: dict
    pairing: tuple
    unit: tuple
    label: str = "explicit"

    @property
    def dim(self) -> int:
        return len(self.unit)

    def entry(self, genus, pairs, kappas=()) -> Fraction:
        key = table_key(genus, pairs, kappas)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingTableEntry(key) from None


def make_table(entries, pairing, unit, label="explicit") -> ExplicitTable:
    """Canonicalize keys and scalars of a raw entry mapping."""
    canonical = {}
    for (genus, pairs, kappas), value in entries.items():
        key = table_key(genus, pairs, kappas)
        value = Fraction(value)
        if key in canonical and canonical[key] != value:
            raise ValueError(f"conflicting values for key {key}")
        canonical[key] = value
    return ExplicitTable(canonical, to_matrix(pairing), to_vector(unit), label)


@dataclass(frozen=True)
class PointTable:
    """Rank-one table: every entry is a pure psi-kappa integral."""

    caps: Caps = WIDE_TABLE_CAPS
    label: str = "point"

    @property
    def pairing(self):
        return ((ONE,),)

    @property
    def unit(self):
        return (ONE,)

    @property
    def dim(self) -> int:
        return 1

    def entry(self, genus, pairs, kappas=()) -> Fraction:
        key = table_key(genus, pairs, kappas)
        if any(a != 0 for a, _ in key[1]):
            raise DimensionMismatch("rank-one table takes basis index zero only")
        powers = tuple(p for _, p in key[1])
        try:
            return psi_kappa_integral(genus, powers, key[2], caps=self.caps)
        except CapExceeded:
            raise MissingTableEntry(key) from None


@dataclass(frozen=True)
class NPointsTable:
    """Diagonal-sector table: entries vanish unless all indices agree."""

    sectors: int
    caps: Caps = WIDE_TABLE_CAPS
    label: str = field(default="")

    def __post_init__(self):
        if self.sectors < 1:
            raise ValueError("need at least one sector")
        if not self.label:
            object.__setattr__(self, "label", f"{self.sectors}points")

    @property
    def pairing(self):
        return identity_matrix(self.sectors)

    @property
    def unit(self):
        return (ONE,) * self.sectors

    @property
    def dim(self) -> int:
        return self.sectors

    def entry(self, genus, pairs, kappas=()) -> Fraction:
        key = table_key(genus, pairs, kappas)
        indices = tuple(a for a, _ in key[1])
        if any(a >= self.sectors for a in indices):
            raise DimensionMismatch("basis index out of range")
        matches = self.sectors if not indices else (1 if len(set(indices)) == 1 else 0)
        if matches == 0:
            return ZERO
        powers = tuple(p for _, p in key[1])
        try:
            return matches * psi_kappa_integral(genus, powers, key[2], caps=self.caps)
        except CapExceeded:
            raise MissingTableEntry(key) from None


def _power_multisets(n, bound):
    """Non-increasing psi-power tuples of length n with sum at most bound."""
    def rec(length, cap, left):
        if length == 0:
            yield ()
            return
        for first in range(min(cap, left), -1, -1):
            for rest in rec(length - 1, first, left - first):
                yield (first,) + rest
    yield from rec(n, bound, bound)


def validate_xtable(table, g_max=1, n_max=4, degree_max=2) -> ValidationReport:
    """Probe a table's pairing row, presence, and string and dilaton identities.

    Probes run over kappa-free keys with basis indices at psi power combinations
    bounded by the arguments; string and dilaton need one more insertion, so
    the table must reach n_max + 1 points.
    """
    report = ValidationReport(label=getattr(table, "label", "table"))
    pairing = to_matrix(table.pairing)
    unit = to_vector(table.unit)
    d = len(unit)
    sym = all(pairing[i][j] == pairing[j][i] for i in range(d) for j in range(d))
    report.add("pairing symmetric", sym)
    try:
        mat_inverse(pairing)
        report.add("pairing invertible", True)
    except Exception:
        report.add("pairing invertible", False)
        return report
    report.add("unit length matches pairing", len(pairing) == d)

    def lookup(genus, pairs):
        return table.entry(genus, pairs, ())

    pair_ok = True
    witness = ""
    for b in range(d):
        for c in range(d):
            got = sum((unit[a] * lookup(0, ((a, 0), (b, 0), (c, 0))) for a in range(d)), ZERO)
            if got != pairing[b][c]:
                pair_ok = False
                witness = f"unit row at ({b}, {c}): {got} vs {pairing[b][c]}"
    report.add("three-point unit insertions reproduce the pairing", pair_ok, witness)

    missing = []
    checked = 0
    string_ok, string_witness = True, ""
    dilaton_ok, dilaton_witness = True, ""
    for g in range(g_max + 1):
        for n in range(n_max + 1):
            if not is_stable(g, n) or not is_stable(g, n + 1):
                continue
            for powers in _power_multisets(n, degree_max):
                for indices in iproduct(range(d), repeat=n):
                    pairs = tuple(zip(indices, powers))
                    try:
                        base = lookup(g, pairs)
                        checked += 1
                    except MissingTableEntry as exc:
                        missing.append(exc.key)
                        continue
                    try:
                        stringed = sum(
                            (unit[a] * lookup(g, pairs + ((a, 0),)) for a in range(d)), ZERO
                        )
                        expected = ZERO
                        for j in range(n):
                            if powers[j] == 0:
                                continue
                            lowered = pairs[:j] + ((indices[j], powers[j] - 1),) + pairs[j + 1:]
                            expected += lookup(g, lowered)
                        if stringed != expected and string_ok:
                            string_ok = False
                            string_witness = f"(g={g}, pairs={pairs}): {stringed} vs {expected}"
                        dilatoned = sum(
                            (unit[a] * lookup(g, pairs + ((a, 1),)) for a in range(d)), ZERO
                        )
                        if dilatoned != (2 * g - 2 + n) * base and dilaton_ok:
                            dilaton_ok = False
                            dilaton_witness = f"(g={g}, pairs={pairs}): {dilatoned}"
                    except MissingTableEntry as exc:
                        missing.append(exc.key)
    report.add(
        "entries present within probe bounds",
        not missing,
        "" if not missing else f"first missing: {missing[0]}",
    )
    report.add(f"string equation on {checked} probed keys", string_ok, string_witness)
    report.add(f"dilaton equation on {checked} probed keys", dilaton_ok, dilaton_witness)
    return report


def x_contraction(table, graph, leg_powers, edge_powers, vertex_kappas, leg_vectors) -> Fraction:
    """Contract table entries over a stable graph with the pairing bivector.

    leg_powers maps a marking to its psi power, edge_powers maps a half-edge id
    to the power at that end, vertex_kappas maps a vertex id to its kappa index
    multiset, and leg_vectors maps a marking to a table-factor vector.
    """
    d = table.dim
    eta_inv = mat_inverse(to_matrix(table.pairing))
    vectors = {}
    for _, marking in graph.legs:
        if marking not in leg_vectors:
            raise DimensionMismatch(f"no vector for marking {marking}")
        vec = to_vector(leg_vectors[marking])
        if len(vec) != d:
            raise DimensionMismatch(f"vector at marking {marking} has length {len(vec)}")
        vectors[marking] = vec
    edges = graph.edges()
    legs = graph.legs
    nv = graph.n_vertices
    kappas = {v: tuple(sorted(vertex_kappas.get(v, ()))) for v in range(nv)}

    total = ZERO
    for leg_idx in iproduct(range(d), repeat=len(legs)):
        weight = ONE
        for (_, marking), a in zip(legs, leg_idx):
            weight *= vectors[marking][a]
            if weight == 0:
                break
        if weight == 0:
            continue
        for edge_idx in iproduct(iproduct(range(d), repeat=2), repeat=len(edges)):
            factor = weight
            for (j, k) in edge_idx:
                factor *= eta_inv[j][k]
                if factor == 0:
                    break
            if factor == 0:
                continue
            pairs_at = [[] for _ in range(nv)]
            for (h, marking), a in zip(legs, leg_idx):
                pairs_at[graph.half_edge_vertex[h]].append((a, leg_powers.get(marking, 0)))
            for (h1, h2), (j, k) in zip(edges, edge_idx):
                pairs_at[graph.half_edge_vertex[h1]].append((j, edge_powers.get(h1, 0)))
                pairs_at[graph.half_edge_vertex[h2]].append((k, edge_powers.get(h2, 0)))
            for v in range(nv):
                factor *= table.entry(graph.vertices[v], tuple(pairs_at[v]), kappas[v])
                if factor == 0:
                    break
            total += factor
    return total


@dataclass(frozen=True)
class ProductSpec:
    """A table factor, a transformed semisimple factor, and tensor insertions."""

    x_table: object
    y_dec: IdempotentDecomposition
    y_r: RMatrix
    genus: int
    inserts: tuple  # ((x vector, y vector, psi power), ...)

    def __post_init__(self):
        object.__setattr__(
            self,
            "inserts",
            tuple((to_vector(x), to_vector(y), int(p)) for x, y, p in self.inserts),
        )
        xdim = self.x_table.dim
        ydim = self.y_dec.dim
        for x, y, p in self.inserts:
            if len(x) != xdim:
                raise DimensionMismatch(f"table-factor vector has length {len(x)}, need {xdim}")
            if len(y) != ydim:
                raise DimensionMismatch(f"semisimple-factor vector has length {len(y)}, need {ydim}")
            if p < 0:
                raise ValueError("psi powers must be nonnegative")
        if self.y_r.dim != ydim:
            raise DimensionMismatch("R-matrix size does not match the semisimple factor")


def product_correlator(spec: ProductSpec, caps=DEFAULT_CAPS, trace=None) -> Fraction:
    """Correlator of the combined theory on tensor insertions.

    When trace is a list, one entry per stable graph is appended with the
    graph's combinatorial encoding, automorphism order, and contribution.
    """
    from .stablegraphs import automorphism_order, enumerate_graphs

    table, dec, r = spec.x_table, spec.y_dec, spec.y_r
    g, inserts = spec.genus, spec.inserts
    n = len(inserts)
    caps.check_pair(g, n, "product_correlator")
    dim = dec.dim
    xdim = table.dim
    norms = tuple(Fraction(x) for x in dec.norms)
    basis = identity_matrix(dim)
    coord_rows = transpose(tuple(idempotent_coordinates(dec, basis[a]) for a in range(dim)))
    eta_x_inv = mat_inverse(to_matrix(table.pairing))

    inverse = invert(r)
    t_series = translation(r, dec.unit)
    edges_raw = edge_series(r, dec.pairing)

    def coords(vector):
        return tuple(
            sum((coord_rows[i][a] * vector[a] for a in range(dim)), ZERO) for i in range(dim)
        )

    leg_sector = {
        (a, k): coords(mat_vec(inverse[k], inserts[a][1]))
        for a in range(n)
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

    table_cache = {}

    def x_vertex(gv, pairs, extras):
        key = (gv, tuple(sorted(pairs)), extras)
        if key not in table_cache:
            total = ZERO
            for mono, coeff in kappa_pushforward(extras).terms:
                total += coeff * table.entry(gv, key[1], mono)
            table_cache[key] = total
        return table_cache[key]

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
            cap -= sum(inserts[a][2] for a in legs_at[v])
            if cap < 0:
                feasible = False
            capacity.append(cap)

        leg_slots = tuple((v, a) for v in range(nv) for a in legs_at[v])
        graph_total = ZERO

        def assignment_value(leg_choice, edge_choice, remaining):
            acc = ZERO
            for leg_idx in iproduct(range(xdim), repeat=len(leg_slots)):
                leg_weight = ONE
                for (_, a), xi in zip(leg_slots, leg_idx):
                    leg_weight *= inserts[a][0][xi]
                    if leg_weight == 0:
                        break
                if leg_weight == 0:
                    continue
                for edge_idx in iproduct(iproduct(range(xdim), repeat=2), repeat=len(edge_list)):
                    x_weight = leg_weight
                    for (j, k) in edge_idx:
                        x_weight *= eta_x_inv[j][k]
                        if x_weight == 0:
                            break
                    if x_weight == 0:
                        continue

                    factors = []
                    for v in range(nv):
                        gv = graph.vertices[v]
                        pairs = [
                            (xi, k + inserts[a][2])
                            for (vv, a), xi, k in zip(leg_slots, leg_idx, leg_choice)
                            if vv == v
                        ]
                        for (u, w), (j, jj), (k, l) in zip(edge_list, edge_idx, edge_choice):
                            if u == v:
                                pairs.append((j, k))
                            if w == v:
                                pairs.append((jj, l))
                        pairs = tuple(pairs)
                        per_sector = [ZERO] * dim
                        for spend in range(remaining[v] + 1):
                            for lam in _partitions(spend, r.order, caps.translation_legs_max):
                                extras = tuple(p + 1 for p in lam)
                                lookup = x_vertex(gv, pairs, extras)
                                if lookup == 0:
                                    continue
                                weight = ONE
                                for part in set(lam):
                                    weight /= factorial(lam.count(part))
                                for i in range(dim):
                                    term = lookup * weight
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

                    sector_sum = ZERO
                    assignment = [0] * nv

                    def rec(v):
                        nonlocal sector_sum
                        if v == nv:
                            term = ONE
                            for u in range(nv):
                                term *= factors[u][assignment[u]]
                                if term == 0:
                                    return
                            for (u, w), (k, l) in zip(edge_list, edge_choice):
                                term *= edge_sector[(k, l)][assignment[u]][assignment[w]]
                                if term == 0:
                                    return
                            sector_sum += term
                            return
                        for i in range(dim):
                            assignment[v] = i
                            rec(v + 1)

                    rec(0)
                    acc += x_weight * sector_sum
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

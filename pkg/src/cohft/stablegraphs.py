"""Stable graphs: enumeration, canonical forms, automorphisms, validation.

A stable graph is stored at half-edge level: each half-edge sits at a vertex,
an involution pairs half-edges into edges (its fixed points are the legs), legs
carry marking indices 1..n, and every vertex carries a genus with
2 g(v) - 2 + n(v) > 0.  The total genus is sum g(v) + |E| - |V| + 1.

Enumeration works on a compact combinatorial form (genus list, marking-to-vertex
map, edge multiset) and produces all graphs reachable from the one-vertex graph
by two moves: trade one unit of vertex genus for a self-loop, and split a vertex
in two along a new edge.  Contracting any edge of any stable graph lands on a
stable graph again, so the closure of these moves is the complete set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product as iproduct
from math import factorial

from .caps import DEFAULT_CAPS, require_stable
from .errors import UnstablePair


@dataclass(frozen=True)
class StableGraph:
    vertices: tuple            # genus per vertex id
    half_edge_vertex: tuple    # vertex id per half-edge id
    involution: tuple          # image half-edge id per half-edge id
    legs: tuple                # (half-edge id, marking) sorted by marking

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    def edges(self):
        """Ordered half-edge pairs (h, iota(h)) with h < iota(h)."""
        return tuple(
            (h, self.involution[h])
            for h in range(len(self.involution))
            if self.involution[h] > h
        )

    def vertex_degree(self, v: int) -> int:
        return sum(1 for hv in self.half_edge_vertex if hv == v)

    def vertex_markings(self, v: int):
        return tuple(m for h, m in self.legs if self.half_edge_vertex[h] == v)

    def genus(self) -> int:
        e = len(self.edges())
        return sum(self.vertices) + e - self.n_vertices + 1

    def edge_vertices(self):
        """Vertex pairs (sorted) for each edge, aligned with edges()."""
        return tuple(
            tuple(sorted((self.half_edge_vertex[a], self.half_edge_vertex[b])))
            for a, b in self.edges()
        )

    def comb(self) -> "CombGraph":
        marking_vertex = tuple(self.half_edge_vertex[h] for h, _ in self.legs)
        edges = tuple(sorted(tuple(sorted((self.half_edge_vertex[a], self.half_edge_vertex[b])))
                             for a, b in self.edges()))
        return CombGraph(self.vertices, marking_vertex, edges)


@dataclass(frozen=True)
class CombGraph:
    """Vertex-level form: genus per vertex, vertex of each marking, edge multiset."""

    genus: tuple
    marking_vertex: tuple
    edges: tuple

    @property
    def n_vertices(self) -> int:
        return len(self.genus)

    def vertex_items(self, v: int):
        legs = sum(1 for u in self.marking_vertex if u == v)
        deg = sum((a == v) + (b == v) for a, b in self.edges)
        return legs + deg

    def total_genus(self) -> int:
        return sum(self.genus) + len(self.edges) - self.n_vertices + 1


@dataclass(frozen=True)
class GraphSet:
    genus: int
    n_legs: int
    graphs: tuple


def _encode(comb: CombGraph, perm):
    """Encoding of the relabeled graph; perm maps old vertex id to new id."""
    order = sorted(range(comb.n_vertices), key=lambda v: perm[v])
    genus = tuple(comb.genus[v] for v in order)
    marks = tuple(perm[v] for v in comb.marking_vertex)
    edges = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in comb.edges))
    return genus, marks, edges


def _refine_classes(comb: CombGraph):
    """Partition vertices by iterated neighborhood invariants."""
    n = comb.n_vertices
    mult = {}
    loops = [0] * n
    for a, b in comb.edges:
        if a == b:
            loops[a] += 1
        else:
            mult[(a, b)] = mult.get((a, b), 0) + 1
    color = []
    for v in range(n):
        marks = tuple(sorted(i for i, u in enumerate(comb.marking_vertex) if u == v))
        color.append((comb.genus[v], marks, loops[v], comb.vertex_items(v)))
    ranks = _rank(color)
    while True:
        new = []
        for v in range(n):
            nbrs = []
            for (a, b), m in mult.items():
                if a == v:
                    nbrs.append((ranks[b], m))
                elif b == v:
                    nbrs.append((ranks[a], m))
            new.append((ranks[v], tuple(sorted(nbrs))))
        new_ranks = _rank(new)
        if new_ranks == ranks:
            break
        ranks = new_ranks
    classes = {}
    for v in range(n):
        classes.setdefault(ranks[v], []).append(v)
    return [classes[r] for r in sorted(classes)]


def _rank(colors):
    order = sorted(set(colors))
    index = {c: i for i, c in enumerate(order)}
    return [index[c] for c in colors]


def _class_permutations(classes):
    """All vertex relabelings that keep each refinement class in its block."""
    starts = []
    pos = 0
    for cls in classes:
        starts.append(pos)
        pos += len(cls)
    for pieces in iproduct(*(permutations(cls) for cls in classes)):
        perm = [0] * pos
        for start, cls_perm in zip(starts, pieces):
            for offset, v in enumerate(cls_perm):
                perm[v] = start + offset
        yield tuple(perm)


def canonical_encoding(comb: CombGraph):
    classes = _refine_classes(comb)
    return min(_encode(comb, p) for p in _class_permutations(classes))


def canonical_comb(comb: CombGraph) -> CombGraph:
    genus, marks, edges = canonical_encoding(comb)
    return CombGraph(genus, marks, edges)


def vertex_automorphisms(comb: CombGraph) -> int:
    """Number of vertex relabelings fixing genus, markings, and edge counts."""
    base = _encode(comb, tuple(range(comb.n_vertices)))
    classes = _refine_classes(comb)
    return sum(1 for p in _class_permutations(classes) if _encode(comb, p) == base)


def automorphism_order(graph: StableGraph) -> int:
    """Order of the automorphism group fixing legs and genus labels."""
    comb = graph.comb()
    count = vertex_automorphisms(comb)
    mult = {}
    loops = {}
    for a, b in comb.edges:
        if a == b:
            loops[a] = loops.get(a, 0) + 1
        else:
            mult[(a, b)] = mult.get((a, b), 0) + 1
    for m in mult.values():
        count *= factorial(m)
    for m in loops.values():
        count *= factorial(m) * 2 ** m
    return count


def _split_moves(comb: CombGraph):
    """All one-edge degenerations of one vertex into two."""
    out = []
    n = comb.n_vertices
    for v in range(n):
        gv = comb.genus[v]
        marks_here = [i for i, u in enumerate(comb.marking_vertex) if u == v]
        plain = {}
        loops_here = 0
        for a, b in comb.edges:
            if a == b == v:
                loops_here += 1
            elif v in (a, b):
                other = b if a == v else a
                plain[other] = plain.get(other, 0) + 1
        others = sorted(plain)
        rest_edges = [e for e in comb.edges if v not in e]
        for g1 in range(gv + 1):
            g2 = gv - g1
            for mark_bits in iproduct((0, 1), repeat=len(marks_here)):
                for splits in iproduct(*(range(plain[o] + 1) for o in others)):
                    for loop_split in _loop_assignments(loops_here):
                        a_loops, b_loops, c_span = loop_split
                        n1 = (sum(1 for b_ in mark_bits if b_ == 0)
                              + sum(splits) + 2 * a_loops + c_span + 1)
                        n2 = (sum(1 for b_ in mark_bits if b_ == 1)
                              + sum(plain[o] - s for o, s in zip(others, splits))
                              + 2 * b_loops + c_span + 1)
                        if 2 * g1 - 2 + n1 <= 0 or 2 * g2 - 2 + n2 <= 0:
                            continue
                        w = n  # index of the new second vertex
                        genus = list(comb.genus)
                        genus[v] = g1
                        genus.append(g2)
                        marking_vertex = list(comb.marking_vertex)
                        for mark, bit in zip(marks_here, mark_bits):
                            marking_vertex[mark] = v if bit == 0 else w
                        edges = list(rest_edges)
                        edges.append((v, w))
                        for o, s in zip(others, splits):
                            edges.extend([tuple(sorted((v, o)))] * s)
                            edges.extend([tuple(sorted((w, o)))] * (plain[o] - s))
                        edges.extend([(v, v)] * a_loops)
                        edges.extend([(w, w)] * b_loops)
                        edges.extend([(v, w)] * c_span)
                        out.append(CombGraph(tuple(genus), tuple(marking_vertex), tuple(sorted(edges))))
    return out


def _loop_assignments(k: int):
    for a in range(k + 1):
        for b in range(k + 1 - a):
            yield a, b, k - a - b


def _genus_drop_moves(comb: CombGraph):
    out = []
    for v in range(comb.n_vertices):
        if comb.genus[v] >= 1:
            genus = list(comb.genus)
            genus[v] -= 1
            edges = tuple(sorted(comb.edges + ((v, v),)))
            out.append(CombGraph(tuple(genus), comb.marking_vertex, edges))
    return out


def enumerate_graphs(g: int, n: int, caps=DEFAULT_CAPS) -> GraphSet:
    """All isomorphism classes of stable graphs of genus g with n legs."""
    caps.check_graph_pair(g, n)
    root = CombGraph((g,), (0,) * n, ())
    require_stable(g, n)
    seen = {canonical_encoding(root): canonical_comb(root)}
    frontier = [canonical_comb(root)]
    while frontier:
        next_frontier = []
        for comb in frontier:
            for move in _genus_drop_moves(comb) + _split_moves(comb):
                enc = canonical_encoding(move)
                if enc not in seen:
                    canon = CombGraph(*enc)
                    seen[enc] = canon
                    next_frontier.append(canon)
        frontier = next_frontier
    graphs = tuple(comb_to_graph(seen[enc]) for enc in sorted(seen))
    return GraphSet(genus=g, n_legs=n, graphs=graphs)


def comb_to_graph(comb: CombGraph) -> StableGraph:
    """Expand a combinatorial form to half-edge data with deterministic ids."""
    n = len(comb.marking_vertex)
    half_edge_vertex = list(comb.marking_vertex)
    involution = list(range(n))
    legs = tuple((i, i + 1) for i in range(n))
    for a, b in comb.edges:
        h1 = len(half_edge_vertex)
        half_edge_vertex.extend([a, b])
        involution.extend([h1 + 1, h1])
    return StableGraph(
        vertices=tuple(comb.genus),
        half_edge_vertex=tuple(half_edge_vertex),
        involution=tuple(involution),
        legs=legs,
    )


def validate(graph: StableGraph):
    """Report every structural invariant; the report carries the genus."""
    from .validation import ValidationReport

    report = ValidationReport(label="stable-graph")
    h = len(graph.half_edge_vertex)
    inv_ok = (len(graph.involution) == h
              and sorted(graph.involution) == list(range(h))
              and all(graph.involution[graph.involution[i]] == i for i in range(h)))
    report.add("involution is an involution", inv_ok)
    if not inv_ok:
        return report
    fixed = {i for i in range(h) if graph.involution[i] == i}
    leg_ids = {hid for hid, _ in graph.legs}
    report.add("legs are exactly the fixed points", fixed == leg_ids)
    marks = sorted(m for _, m in graph.legs)
    report.add("markings are 1..n", marks == list(range(1, len(graph.legs) + 1)))
    vertex_ok = all(0 <= v < graph.n_vertices for v in graph.half_edge_vertex)
    report.add("half-edges attach to vertices", vertex_ok)
    if not vertex_ok:
        return report
    stable = True
    witness = ""
    for v, gv in enumerate(graph.vertices):
        if 2 * gv - 2 + graph.vertex_degree(v) <= 0:
            stable, witness = False, f"vertex {v}"
            break
    report.add("every vertex stable", stable, witness)
    adj = {v: set() for v in range(graph.n_vertices)}
    for a, b in graph.edges():
        adj[graph.half_edge_vertex[a]].add(graph.half_edge_vertex[b])
        adj[graph.half_edge_vertex[b]].add(graph.half_edge_vertex[a])
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    report.add("graph connected", len(seen) == graph.n_vertices)
    report.data["genus"] = graph.genus()
    return report

"""Combinatorics of quotient graphs on one or two vertices.

Covers circuit rank, classification into bouquet/double-bouquet/dipole
families, admissible topologies for given (dimension, degree), abstract
graph builders, and enumeration of integer shift assignments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import ceil, comb

import numpy as np

from math import gcd

from .intlinalg import _det_int
from .netcore import QuotientGraph

ENUMERATION_LIMIT = 10 ** 7


@dataclass(frozen=True)
class TopologyClass:
    """Structural type of a quotient graph.

    ``kind`` is one of 'bouquet', 'double_bouquet', 'dipole', 'other';
    ``loops`` counts loops per bouquet vertex and ``bridges`` the
    connecting edges.
    """

    kind: str
    loops: int
    bridges: int
    circuit_rank: int
    degree: int
    vertex_count: int

    @staticmethod
    def bouquet(loops: int) -> "TopologyClass":
        if loops < 1:
            raise ValueError("bouquet needs at least one loop")
        return TopologyClass("bouquet", loops, 0, loops, 2 * loops, 1)

    @staticmethod
    def double_bouquet(loops: int, bridges: int) -> "TopologyClass":
        if loops < 0 or bridges < 1:
            raise ValueError("double bouquet needs loops >= 0 and bridges >= 1")
        kind = "dipole" if loops == 0 else "double_bouquet"
        return TopologyClass(kind, loops, bridges, 2 * loops + bridges - 1,
                             2 * loops + bridges, 2)

    @staticmethod
    def dipole(bridges: int) -> "TopologyClass":
        return TopologyClass.double_bouquet(0, bridges)

    @property
    def tag(self) -> str:
        if self.kind == "bouquet":
            return f"B{self.loops}"
        if self.kind == "dipole":
            return f"D{self.bridges}"
        if self.kind == "double_bouquet":
            return f"D{self.loops},{self.bridges}"
        return "other"

    @staticmethod
    def from_tag(tag: str) -> "TopologyClass":
        """Parse tags like 'B3', 'D5', 'D1,3' (also 'D1_3')."""
        t = tag.strip().upper().replace("_", ",")
        try:
            if t.startswith("B"):
                return TopologyClass.bouquet(int(t[1:]))
            if t.startswith("D"):
                body = t[1:]
                if "," in body:
                    l, k = body.split(",")
                    return TopologyClass.double_bouquet(int(l), int(k))
                return TopologyClass.dipole(int(body))
        except ValueError as exc:
            raise ValueError(f"cannot parse topology tag {tag!r}") from exc
        raise ValueError(f"cannot parse topology tag {tag!r}")


def circuit_rank(g: QuotientGraph) -> int:
    """1 - #vertices + #edges; the number of independent cycles."""
    if not g.is_connected():
        raise ValueError("circuit rank requires a connected graph")
    return 1 - g.vertex_count + g.edge_count


def classify(g: QuotientGraph) -> TopologyClass:
    """Exact structural match against the bouquet/double-bouquet families."""
    if not g.is_connected():
        raise ValueError("classification requires a connected graph")
    deg = g.degrees()
    if len(set(deg.tolist())) != 1:
        raise ValueError(f"graph is not regular: degrees {deg.tolist()}")
    d = int(deg[0])
    rank = circuit_rank(g)
    V = g.vertex_count
    loops_at = np.zeros(V, dtype=int)
    bridges = 0
    for t, h, _ in g.edges:
        if t == h:
            loops_at[t] += 1
        else:
            bridges += 1
    if V == 1:
        return TopologyClass("bouquet", int(loops_at[0]), 0, rank, d, 1)
    if V == 2 and loops_at[0] == loops_at[1]:
        l = int(loops_at[0])
        kind = "dipole" if l == 0 else "double_bouquet"
        return TopologyClass(kind, l, bridges, rank, d, 2)
    return TopologyClass("other", int(loops_at.sum()), bridges, rank, d, V)


def min_vertex_count(n: int, d: int) -> tuple[int, list[TopologyClass]]:
    """Least possible quotient vertex count and the admissible topologies.

    For even d >= 2n a single vertex suffices (bouquet); for the other
    d >= n+1 two vertices with the double-bouquet types D_{l,k}, k >= 2,
    2l + k = d.  For d <= n only the counting bound is reported, with no
    structural candidates.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if d < 3:
        raise ValueError("degree must be >= 3")
    if d % 2 == 0 and d >= 2 * n:
        return 1, [TopologyClass.bouquet(d // 2)]
    if d >= n + 1:
        ks = range(d, 1, -2)
        return 2, [TopologyClass.double_bouquet((d - k) // 2, k) for k in ks]
    return ceil((2 * n - 2) / (d - 2)), []


def build_abstract(tag: TopologyClass | str, dim: int) -> QuotientGraph:
    """Combinatorial multigraph for a topology tag, all shifts zero.

    Edge order: loops at vertex 0, loops at vertex 1, then bridges; the
    first bridge doubles as the spanning-tree edge in enumeration.
    """
    top = TopologyClass.from_tag(tag) if isinstance(tag, str) else tag
    z = [0] * dim
    if top.kind == "bouquet":
        edges = [(0, 0, z) for _ in range(top.loops)]
        return QuotientGraph.from_edges(dim, 1, edges)
    if top.kind in ("dipole", "double_bouquet"):
        edges = [(0, 0, z) for _ in range(top.loops)]
        edges += [(1, 1, z) for _ in range(top.loops)]
        edges += [(0, 1, z) for _ in range(top.bridges)]
        return QuotientGraph.from_edges(dim, 2, edges)
    raise ValueError(f"cannot build abstract graph for kind {top.kind!r}")


def _nonzero_shifts(n: int, s_max: int) -> list[tuple[int, ...]]:
    return [s for s in itertools.product(range(-s_max, s_max + 1), repeat=n)
            if any(s)]


def _sign_canonical(s: tuple[int, ...]) -> tuple[int, ...]:
    for x in s:
        if x > 0:
            return s
        if x < 0:
            return tuple(-v for v in s)
    return s


def _loop_classes(n: int, s_max: int) -> list[tuple[int, ...]]:
    return sorted(set(_sign_canonical(s) for s in _nonzero_shifts(n, s_max)))


def _rows_generate_zn(rows: tuple[tuple[int, ...], ...], n: int) -> bool:
    # gcd of all n x n minors equals 1 <=> rank n and all Smith factors 1
    g = 0
    for sub in itertools.combinations(rows, n):
        g = gcd(g, abs(_det_int([list(r) for r in sub])))
        if g == 1:
            return True
    return False


def enumerate_shifts(g: QuotientGraph, n: int, s_max: int = 1) -> list[QuotientGraph]:
    """All valid shift assignments for a one- or two-vertex skeleton.

    The first bridge is gauge-fixed to shift zero; loop shifts are taken
    sign-canonically (a loop and its reverse are the same edge).  Kept
    assignments have full-rank, lattice-generating cycle shifts; exact
    duplicates and global-negation duplicates are removed.
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    arrays = enumerate_shift_arrays(g, n, s_max)
    out = []
    for S in arrays:
        out.append(QuotientGraph(n, g.vertex_count, g.tails, g.heads, S))
    return out


def enumerate_shift_arrays(g: QuotientGraph, n: int, s_max: int = 1) -> list[np.ndarray]:
    """Shift matrices for :func:`enumerate_shifts`, in the skeleton's edge order."""
    return list(iter_shift_arrays(g, n, s_max))


def iter_shift_arrays(g: QuotientGraph, n: int, s_max: int = 1):
    """Lazy form of :func:`enumerate_shift_arrays`; same guard and order."""
    top = classify(g)
    if top.kind == "other":
        raise ValueError("shift enumeration supports one- and two-vertex skeletons only")
    loops0 = [e for e, (t, h, _) in enumerate(g.edges) if t == h and t == 0]
    loops1 = [e for e, (t, h, _) in enumerate(g.edges) if t == h and t == 1]
    bridges = [e for e, (t, h, _) in enumerate(g.edges) if t != h]

    classes = _loop_classes(n, s_max)
    nonzero = _nonzero_shifts(n, s_max)
    zero = tuple([0] * n)

    raw = (comb(len(classes), len(loops0))
           * (comb(len(classes), len(loops1)) if loops1 else 1)
           * (comb(len(nonzero), len(bridges) - 1) if len(bridges) >= 2 else 1))
    if raw > ENUMERATION_LIMIT:
        raise RuntimeError(
            f"raw shift-assignment count {raw} exceeds limit {ENUMERATION_LIMIT}")

    loop_sets0 = list(itertools.combinations(classes, len(loops0)))
    loop_sets1 = (list(itertools.combinations(classes, len(loops1)))
                  if loops1 else [()])
    free_bridge_sets = (list(itertools.combinations(nonzero, len(bridges) - 1))
                        if len(bridges) >= 2 else [()])

    seen = set()
    for la in loop_sets0:
        for lb in loop_sets1:
            for br in free_bridge_sets:
                if not _rows_generate_zn(la + lb + br, n):
                    continue
                neg = tuple(sorted(tuple(-x for x in s) for s in br))
                key = (la, lb, min(tuple(sorted(br)), neg))
                if key in seen:
                    continue
                seen.add(key)
                S = np.zeros((g.edge_count, n), dtype=np.int64)
                for e, s in zip(loops0, la):
                    S[e] = s
                for e, s in zip(loops1, lb):
                    S[e] = s
                if bridges:
                    S[bridges[0]] = zero
                    for e, s in zip(bridges[1:], br):
                        S[e] = s
                yield S

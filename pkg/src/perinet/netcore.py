"""Core model of lattice-periodic networks and their measures.

A network is stored as a finite quotient multigraph whose edges carry
integer lattice shifts, together with a rank-n lattice basis and
Cartesian vertex positions.  The infinite periodic lift is implicit: the
edge (t, h, s) lifts to straight segments from x_t + Bk to x_h + B(k+s)
for every integer vector k, where B is the basis matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .intlinalg import integer_rank, smith_invariant_factors

# Two unit directions closer than this in max norm count as positively
# parallel; straight segments sharing an endpoint overlap exactly then.
DIRECTION_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, order="C")        # copy, so the caller's array stays writable
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class QuotientGraph:
    """Finite multigraph with an integer shift vector on every edge.

    ``tails``/``heads`` are edge endpoint indices, ``shifts`` the
    (E, dim) integer shift matrix.  Loops are stored once and count
    twice towards the vertex degree.
    """

    dim: int
    vertex_count: int
    tails: np.ndarray
    heads: np.ndarray
    shifts: np.ndarray

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("ambient dimension must be >= 2")
        if self.vertex_count < 1:
            raise ValueError("need at least one vertex")
        tails = np.asarray(self.tails, dtype=np.int64).ravel()
        heads = np.asarray(self.heads, dtype=np.int64).ravel()
        shifts = np.asarray(self.shifts, dtype=np.int64).reshape(len(tails), self.dim)
        if len(heads) != len(tails):
            raise ValueError("tail/head arrays differ in length")
        for arr in (tails, heads):
            if len(arr) and (arr.min() < 0 or arr.max() >= self.vertex_count):
                raise ValueError("edge endpoint out of range")
        object.__setattr__(self, "tails", _freeze(tails))
        object.__setattr__(self, "heads", _freeze(heads))
        object.__setattr__(self, "shifts", _freeze(shifts))

    @classmethod
    def from_edges(cls, dim: int, vertex_count: int,
                   edges: Iterable[tuple[int, int, Sequence[int]]]) -> "QuotientGraph":
        edges = list(edges)
        tails = [e[0] for e in edges]
        heads = [e[1] for e in edges]
        shifts = [list(e[2]) for e in edges] if edges else np.zeros((0, dim), int)
        return cls(dim, vertex_count, np.array(tails, int), np.array(heads, int),
                   np.array(shifts, int).reshape(len(edges), dim))

    @property
    def edge_count(self) -> int:
        return len(self.tails)

    @property
    def edges(self) -> list[tuple[int, int, tuple[int, ...]]]:
        return [(int(t), int(h), tuple(int(x) for x in s))
                for t, h, s in zip(self.tails, self.heads, self.shifts)]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        np.add.at(deg, self.tails, 1)
        np.add.at(deg, self.heads, 1)
        return deg

    def is_connected(self) -> bool:
        seen = np.zeros(self.vertex_count, dtype=bool)
        stack = [0]
        seen[0] = True
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for t, h in zip(self.tails, self.heads):
            adj[t].append(int(h))
            adj[h].append(int(t))
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())

    def cycle_shift_matrix(self) -> np.ndarray:
        """Net shifts around the fundamental cycles of a spanning tree.

        Row i is the total shift accumulated by the cycle that the i-th
        non-tree edge closes.  For a connected graph the row count is the
        circuit rank.
        """
        V = self.vertex_count
        potential = np.zeros((V, self.dim), dtype=np.int64)
        in_tree = np.zeros(self.edge_count, dtype=bool)
        visited = np.zeros(V, dtype=bool)
        visited[0] = True
        incident: list[list[int]] = [[] for _ in range(V)]
        for e, (t, h) in enumerate(zip(self.tails, self.heads)):
            incident[t].append(e)
            incident[h].append(e)
        stack = [0]
        while stack:
            v = stack.pop()
            for e in incident[v]:
                t, h = int(self.tails[e]), int(self.heads[e])
                w = h if t == v else t
                if visited[w] or w == v:
                    continue
                visited[w] = True
                in_tree[e] = True
                sign = 1 if t == v else -1
                potential[w] = potential[v] + sign * self.shifts[e]
                stack.append(w)
        rows = []
        for e in range(self.edge_count):
            if in_tree[e]:
                continue
            t, h = int(self.tails[e]), int(self.heads[e])
            rows.append(self.shifts[e] + potential[t] - potential[h])
        if not rows:
            return np.zeros((0, self.dim), dtype=np.int64)
        return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class Lattice:
    """Rank-n lattice given by an ordered real basis (columns of ``basis``)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("lattice basis must be a square matrix")
        object.__setattr__(self, "basis", _freeze(b))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def volume(self) -> float:
        """|det(basis)|; raises on a singular basis."""
        d = abs(float(np.linalg.det(self.basis)))
        if d == 0.0 or not np.isfinite(d):
            raise ValueError("singular lattice basis")
        return d


@dataclass(frozen=True)
class PeriodicNetwork:
    """Immutable periodic network: quotient graph, lattice, vertex positions."""

    graph: QuotientGraph
    lattice: Lattice
    positions: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=np.float64)
        if p.shape != (self.graph.vertex_count, self.graph.dim):
            raise ValueError("positions must be (vertex_count, dim)")
        if self.lattice.dim != self.graph.dim:
            raise ValueError("lattice dimension does not match graph")
        object.__setattr__(self, "positions", _freeze(p))

    @property
    def dim(self) -> int:
        return self.graph.dim


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of all structural and geometric checks on a network."""

    degree_regular: bool
    degree: int | None
    immersed: bool
    quotient_connected: bool
    simple: bool
    cycle_rank: int
    rank_full: bool
    lift_connected: bool
    invariant_factors: tuple[int, ...]
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def edge_vector(net: PeriodicNetwork, e: int) -> np.ndarray:
    """Cartesian vector of quotient edge ``e``: pos[head] + B shift - pos[tail]."""
    g = net.graph
    if not 0 <= e < g.edge_count:
        raise ValueError(f"unknown edge id {e}")
    return (net.positions[g.heads[e]]
            + net.lattice.basis @ g.shifts[e].astype(np.float64)
            - net.positions[g.tails[e]])


def edge_vectors(net: PeriodicNetwork) -> np.ndarray:
    """All edge vectors as an (E, dim) array."""
    g = net.graph
    return (net.positions[g.heads]
            + g.shifts.astype(np.float64) @ net.lattice.basis.T
            - net.positions[g.tails])


def edge_lengths(net: PeriodicNetwork) -> np.ndarray:
    return np.linalg.norm(edge_vectors(net), axis=1)


def length(net: PeriodicNetwork) -> float:
    """Total length of the quotient network; raises on a zero-length edge."""
    ell = edge_lengths(net)
    if np.any(ell == 0.0):
        raise ValueError(f"zero-length edge {int(np.argmin(ell))}")
    return float(ell.sum())


def volume(net: PeriodicNetwork) -> float:
    """Volume of the fundamental domain, |det(basis)|."""
    return net.lattice.volume()


def length_quotient(net: PeriodicNetwork) -> float:
    """Scaling-invariant objective L^n / V."""
    return length(net) ** net.dim / volume(net)


def _outgoing_units(net: PeriodicNetwork, vecs: np.ndarray, ell: np.ndarray,
                    v: int) -> list[np.ndarray]:
    g = net.graph
    units = []
    for e in range(g.edge_count):
        if ell[e] == 0.0:
            continue
        u = vecs[e] / ell[e]
        if g.tails[e] == v:
            units.append(u)
        if g.heads[e] == v:
            units.append(-u)
    return units


def validate(net: PeriodicNetwork) -> ValidityReport:
    """Run every structural and geometric check; never raises.

    Covers degree regularity, immersion of the lift (pairwise distinct
    outgoing directions at each vertex), quotient connectivity,
    quotient-level simplicity, the rational rank of the cycle-shift
    matrix, and lift connectivity (all Smith invariant factors 1).
    """
    g = net.graph
    violations: list[str] = []

    deg = g.degrees()
    degree_regular = bool(len(set(deg.tolist())) == 1)
    degree = int(deg[0]) if degree_regular else None
    if not degree_regular:
        violations.append(f"degrees not regular: {deg.tolist()}")
    elif degree < 3:
        violations.append(f"degree {degree} < 3")

    connected = g.is_connected()
    if not connected:
        violations.append("quotient graph disconnected")

    # loops must carry a nonzero shift (zero-length lift edge otherwise)
    for e in range(g.edge_count):
        if g.tails[e] == g.heads[e] and not g.shifts[e].any():
            violations.append(f"loop {e} has zero shift")

    vecs = edge_vectors(net)
    ell = np.linalg.norm(vecs, axis=1)
    zero_edges = np.flatnonzero(ell == 0.0)
    for e in zero_edges:
        violations.append(f"zero-length edge {int(e)}")

    immersed = True
    for v in range(g.vertex_count):
        units = _outgoing_units(net, vecs, ell, v)
        for i in range(len(units)):
            for j in range(i + 1, len(units)):
                if np.max(np.abs(units[i] - units[j])) < DIRECTION_TOL:
                    immersed = False
                    violations.append(f"parallel outgoing edges at vertex {v}")
                    break
            if not immersed:
                break
        if not immersed:
            break

    seen: set[tuple] = set()
    simple = True
    for t, h, s in g.edges:
        key = min((t, h, s), (h, t, tuple(-x for x in s)))
        if key in seen:
            simple = False
            violations.append(f"duplicate edge {(t, h, s)}")
        seen.add(key)

    M = g.cycle_shift_matrix()
    cycle_rank = integer_rank(M)
    rank_full = cycle_rank == g.dim
    if not rank_full:
        violations.append(f"cycle-shift rank {cycle_rank} < dimension {g.dim}")
    factors = smith_invariant_factors(M)
    lift_connected = len(factors) == g.dim and all(d == 1 for d in factors)
    if rank_full and not lift_connected:
        violations.append(f"lift disconnected: invariant factors {factors}")

    return ValidityReport(
        degree_regular=degree_regular,
        degree=degree,
        immersed=immersed,
        quotient_connected=connected,
        simple=simple,
        cycle_rank=cycle_rank,
        rank_full=rank_full,
        lift_connected=lift_connected,
        invariant_factors=factors,
        violations=tuple(violations),
    )


def with_positions(net: PeriodicNetwork, positions: np.ndarray) -> PeriodicNetwork:
    """Copy of ``net`` with replaced vertex positions."""
    return PeriodicNetwork(net.graph, net.lattice, positions)


def scaled(net: PeriodicNetwork, c: float) -> PeriodicNetwork:
    """Similarity image of the network: positions and basis scaled by c."""
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return PeriodicNetwork(net.graph, Lattice(net.lattice.basis * c),
                           net.positions * c)

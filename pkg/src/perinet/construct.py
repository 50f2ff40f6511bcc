"""Exact balanced constructions and the catalog of minimizing networks.

The generic constructors realize one- and two-vertex balanced networks
of any admissible degree over an arbitrary lattice; the catalog holds
closed-form coordinates of the sharp minimizers, with their expected
length quotients stored as exact expressions evaluated on demand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .balance import geometric_median
from .netcore import Lattice, PeriodicNetwork, QuotientGraph
from .reduction import lagrange_reduce_pair
from .topology import TopologyClass, classify


@dataclass(frozen=True)
class CatalogEntry:
    """Metadata for one catalog network."""

    name: str
    dim: int
    degree: int
    topology: TopologyClass
    parameters: dict = field(default_factory=dict)
    expected_quotient: float = float("nan")
    expected_expr: str = ""


def _net(dim, vertex_count, edges, basis, positions) -> PeriodicNetwork:
    g = QuotientGraph.from_edges(dim, vertex_count, edges)
    return PeriodicNetwork(g, Lattice(np.asarray(basis, float)),
                           np.asarray(positions, float))


def _parallel_int(s: tuple[int, ...], t: tuple[int, ...]) -> bool:
    # integer vectors are parallel iff all 2x2 cross terms vanish
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] * t[j] != s[j] * t[i]:
                return False
    return True


def _shift_pool(n: int, basis: np.ndarray, span: int = 2) -> list[tuple[int, ...]]:
    """Sign-canonical candidate shifts ordered by lattice-vector norm."""
    cands = []
    for s in itertools.product(range(-span, span + 1), repeat=n):
        if not any(s):
            continue
        for x in s:
            if x > 0:
                break
            if x < 0:
                s = tuple(-v for v in s)
                break
        cands.append(s)
    cands = sorted(set(cands))
    norms = [float(np.linalg.norm(basis @ np.array(s, float))) for s in cands]
    order = sorted(range(len(cands)),
                   key=lambda i: (norms[i], tuple(-x for x in cands[i])))
    return [cands[i] for i in order]


def _pick_loops(n: int, basis: np.ndarray, per_vertex: int, required: list,
                *, skip_axes: tuple[int, ...] = (), out_of_plane: bool = False,
                avoid_dirs: tuple[np.ndarray, ...] = ()) -> list[list[tuple[int, ...]]]:
    """Distribute loop shifts over two vertices.

    Required generator shifts are dealt round-robin, then the pool tops up
    each vertex; within a vertex no two loop vectors may be parallel, and
    none may be parallel to a direction in ``avoid_dirs``.
    """
    chosen: list[list[tuple[int, ...]]] = [[], []]
    queue = list(required)
    slot = 0
    while queue:
        v = slot % 2
        if len(chosen[v]) < per_vertex:
            chosen[v].append(queue.pop(0))
        slot += 1
        if slot > 4 * per_vertex + 8:
            raise RuntimeError("cannot place required loop shifts")
    pool = _shift_pool(n, basis)
    if out_of_plane:
        pool = [s for s in pool if any(s[i] for i in range(n) if i not in skip_axes)]
    else:
        pool = [s for s in pool
                if not any(_parallel_int(s, _unit_shift(n, i)) for i in skip_axes)]
    for v in range(2):
        for cand in pool:
            if len(chosen[v]) == per_vertex:
                break
            if any(_parallel_int(cand, s) for s in chosen[v]):
                continue
            vec = basis @ np.array(cand, float)
            u = vec / np.linalg.norm(vec)
            if any(min(np.max(np.abs(u - w)), np.max(np.abs(u + w))) < 1e-9
                   for w in avoid_dirs):
                continue
            chosen[v].append(cand)
        if len(chosen[v]) < per_vertex:
            raise RuntimeError("shift pool exhausted while placing loops")
    return chosen


def _unit_shift(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def construct_bouquet(n: int, d: int, lattice: Lattice) -> PeriodicNetwork:
    """One-vertex balanced network of even degree d >= 2n over ``lattice``.

    The first n loops run along the lattice generators; further loops use
    the shortest lattice vectors that are not parallel to any loop already
    chosen, so the star of the single vertex stays embedded.
    """
    if d % 2 != 0 or d < 2 * n:
        raise ValueError("bouquet construction needs even degree d >= 2n")
    if lattice.dim != n:
        raise ValueError("lattice dimension mismatch")
    B = lattice.basis
    chosen = [_unit_shift(n, i) for i in range(n)]
    for cand in _shift_pool(n, B):
        if len(chosen) == d // 2:
            break
        if any(_parallel_int(cand, s) for s in chosen):
            continue
        chosen.append(cand)
    if len(chosen) < d // 2:
        raise RuntimeError("shift pool exhausted while extending the bouquet")
    edges = [(0, 0, s) for s in chosen]
    return _net(n, 1, edges, B, np.zeros((1, n)))


def construct_odd(n: int, d: int, lattice: Lattice) -> PeriodicNetwork:
    """Two-vertex balanced network of odd degree d >= n+1 over ``lattice``.

    The two in-plane generators are Lagrange-reduced so they enclose an
    angle in [60, 90] degrees, which puts the Fermat point of the triangle
    (0, g1, g2) in its interior; three bridges meet there at 120 degrees
    and the remaining degree comes from loops in opposite pairs.
    """
    if d % 2 != 1 or d < n + 1:
        raise ValueError("odd construction needs odd degree d >= n+1")
    if lattice.dim != n:
        raise ValueError("lattice dimension mismatch")
    B, _ = lagrange_reduce_pair(lattice.basis)
    g1, g2 = B[:, 0], B[:, 1]
    tripod = np.array([np.zeros(n), g1, g2])
    q, at_vertex = geometric_median(tripod, tol=1e-13)
    if at_vertex is not None:
        raise RuntimeError("Fermat point degenerated to a triangle vertex")

    per_vertex = (d - 3) // 2
    edges = []
    loops = [[], []]
    if per_vertex:
        dirs0 = tuple(u / np.linalg.norm(u) for u in (q, q - g1, q - g2))
        required = [_unit_shift(n, i) for i in range(2, n)]
        loops = _pick_loops(n, B, per_vertex, required, skip_axes=(0, 1),
                            out_of_plane=(n > 2), avoid_dirs=dirs0)
    for s in loops[0]:
        edges.append((0, 0, s))
    for s in loops[1]:
        edges.append((1, 1, s))
    edges.append((0, 1, tuple([0] * n)))
    edges.append((0, 1, tuple(-x for x in _unit_shift(n, 0))))
    edges.append((0, 1, tuple(-x for x in _unit_shift(n, 1))))
    positions = np.vstack([np.zeros(n), q])
    return _net(n, 2, edges, B, positions)


def construct_even_two_vertex(n: int, d: int, lattice: Lattice,
                              q_param: float = 0.5) -> PeriodicNetwork:
    """Two-vertex balanced network of even degree d >= n+1 over ``lattice``.

    The second vertex sits at q_param * g1 on the segment from the origin
    to g1, splitting it into two opposite bridges; all remaining degree
    comes from loops covering the other generators.
    """
    if d % 2 != 0 or d < n + 1:
        raise ValueError("even two-vertex construction needs even degree d >= n+1")
    if lattice.dim != n:
        raise ValueError("lattice dimension mismatch")
    if not 0.0 < q_param < 1.0:
        raise ValueError("q_param must lie strictly between 0 and 1")
    B = lattice.basis
    per_vertex = d // 2 - 1
    required = [_unit_shift(n, i) for i in range(1, n)]
    loops = _pick_loops(n, B, per_vertex, required, skip_axes=(0,),
                        out_of_plane=False)
    edges = []
    for s in loops[0]:
        edges.append((0, 0, s))
    for s in loops[1]:
        edges.append((1, 1, s))
    zero = tuple([0] * n)
    edges.append((0, 1, zero))
    edges.append((0, 1, tuple(-x for x in _unit_shift(n, 0))))
    positions = np.vstack([np.zeros(n), q_param * B[:, 0]])
    return _net(n, 2, edges, B, positions)


# ---------------------------------------------------------------------------
# catalog


def _entry(name, net, params, expected, expr) -> tuple[PeriodicNetwork, CatalogEntry]:
    top = classify(net.graph)
    return net, CatalogEntry(name=name, dim=net.dim, degree=top.degree,
                             topology=top, parameters=params,
                             expected_quotient=expected, expected_expr=expr)


def _catalog_hcb(**_):
    net = _net(2, 2,
               [(0, 1, (0, 0)), (0, 1, (-1, 0)), (0, 1, (0, -1))],
               [[1.5, 1.5], [math.sqrt(3) / 2, -math.sqrt(3) / 2]],
               [[0.0, 0.0], [1.0, 0.0]])
    return _entry("hcb", net, {}, 2 * math.sqrt(3), "2*sqrt(3)")


def _catalog_pcu(n: int = 3, **_):
    if n < 2:
        raise ValueError("pcu needs dimension n >= 2")
    net = _net(n, 1, [(0, 0, _unit_shift(n, i)) for i in range(n)],
               np.eye(n), np.zeros((1, n)))
    return _entry("pcu", net, {"n": n}, float(n) ** n, f"{n}^{n}")


def _catalog_cube_net(n: int = 3, **_):
    net, entry = _catalog_pcu(n=n)
    return net, CatalogEntry(name="cube_net", dim=entry.dim, degree=entry.degree,
                             topology=entry.topology, parameters=entry.parameters,
                             expected_quotient=entry.expected_quotient,
                             expected_expr=entry.expected_expr)


def _catalog_sql(**_):
    net, entry = _catalog_pcu(n=2)
    return net, CatalogEntry(name="sql", dim=2, degree=4, topology=entry.topology,
                             parameters={}, expected_quotient=4.0,
                             expected_expr="2^2")


def _catalog_dia(**_):
    net = _net(3, 2,
               [(0, 1, (0, 0, 0)), (0, 1, (-1, 0, 0)),
                (0, 1, (0, -1, 0)), (0, 1, (0, 0, -1))],
               [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]],
               [[0.0, 0.0, 0.0], [0.25, 0.25, 0.25]])
    return _entry("dia", net, {}, 12 * math.sqrt(3), "12*sqrt(3)")


def _catalog_cds(t: float = 0.5, **_):
    if not 0.0 < t < 1.0:
        raise ValueError("cds parameter t must lie strictly in (0, 1)")
    net = _net(3, 2,
               [(0, 0, (1, 0, 0)), (1, 1, (0, 1, 0)),
                (0, 1, (0, 0, 0)), (0, 1, (0, 0, -1))],
               np.eye(3),
               [[0.0, 0.0, 0.0], [0.0, 0.0, t]])
    return _entry("cds", net, {"t": t}, 27.0, "3^3")


def _catalog_bnn(**_):
    r3 = math.sqrt(3)
    net = _net(3, 2,
               [(0, 0, (0, 0, 1)), (1, 1, (0, 0, 1)),
                (0, 1, (0, 0, 0)), (0, 1, (-1, 1, 0)), (0, 1, (-1, 0, 0))],
               [[-1.5, 0.0, 0.0], [r3 / 2, r3, 0.0], [0.0, 0.0, 0.75]],
               [[0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    return _entry("bnn", net, {}, 27 * r3, "27*sqrt(3)")


def _catalog_sqp(**_):
    rho = math.sqrt(15) / 4
    z = -15.0 / 8.0
    net = _net(3, 2,
               [(0, 1, (0, 0, 0)), (0, 1, (1, 0, 0)), (0, 1, (0, 1, 0)),
                (0, 1, (0, 0, 1)), (0, 1, (1, -1, 1))],
               [[rho, 0.0, -rho], [0.0, rho, 0.0], [z, z, z]],
               [[0.0, 0.0, 0.0], [0.0, 0.0, 13.0 / 8.0]])
    return _entry("sqp", net, {}, 405.0 / 8.0, "405/8")


def regular_simplex_vertices(n: int) -> np.ndarray:
    """Vertices of a regular n-simplex with circumcentre 0 and radius 1.

    Built from the Gram matrix with unit diagonal and off-diagonal -1/n
    via Cholesky, so the construction is dimension-generic.
    """
    gram = -np.ones((n, n)) / n + np.eye(n) * (1 + 1.0 / n)
    chol = np.linalg.cholesky(gram)
    verts = chol  # rows are v_1..v_n with <v_i, v_j> = gram[i, j]
    v0 = -verts.sum(axis=0)
    return np.vstack([v0, verts])


def _catalog_simplex_net(n: int = 3, **_):
    if n < 2:
        raise ValueError("simplex_net needs dimension n >= 2")
    verts = regular_simplex_vertices(n)
    v0, rest = verts[0], verts[1:]
    basis = (rest - v0).T          # columns g_i = v_i - v_0
    edges = [(0, 1, tuple([0] * n))]
    edges += [(0, 1, _unit_shift(n, i)) for i in range(n)]
    positions = np.vstack([np.zeros(n), v0])
    net = _net(n, 2, edges, basis, positions)
    expected = math.sqrt((n + 1) ** (n - 1) * n ** n)
    return _entry("simplex_net", net, {"n": n}, expected,
                  f"sqrt({n + 1}^{n - 1} * {n}^{n})")


_CATALOG = {
    "hcb": _catalog_hcb,
    "sql": _catalog_sql,
    "dia": _catalog_dia,
    "cds": _catalog_cds,
    "bnn": _catalog_bnn,
    "sqp": _catalog_sqp,
    "pcu": _catalog_pcu,
    "simplex_net": _catalog_simplex_net,
    "cube_net": _catalog_cube_net,
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog(name: str, **params) -> tuple[PeriodicNetwork, CatalogEntry]:
    """Build a catalog network by name.

    Parameters: ``cds`` takes ``t`` in (0,1); ``pcu``, ``cube_net`` and
    ``simplex_net`` take the dimension ``n``.
    """
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown catalog name {name!r}; "
                         f"known: {', '.join(CATALOG_NAMES)}") from None
    return builder(**params)

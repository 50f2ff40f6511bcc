"""Canonical JSON serialization and Wavefront OBJ export.

The JSON document holds the dimension, the vertices with positions, the
lattice basis column by column, and the shift-labeled edges.  Floats are
written with 17 significant digits, which round-trips IEEE doubles
exactly; the writer output is byte-stable for a given network.
"""

from __future__ import annotations

import itertools
import json
from typing import IO

import numpy as np

from .netcore import Lattice, PeriodicNetwork, QuotientGraph


def _fnum(x: float) -> str:
    return format(float(x), ".17g")


def network_to_json(net: PeriodicNetwork) -> str:
    """Serialize a network to its canonical JSON text."""
    g = net.graph
    parts = ['{\n  "dim": %d,\n  "vertices": [\n' % g.dim]
    vrows = []
    for v in range(g.vertex_count):
        pos = ", ".join(_fnum(x) for x in net.positions[v])
        vrows.append('    {"id": %d, "pos": [%s]}' % (v, pos))
    parts.append(",\n".join(vrows))
    parts.append('\n  ],\n  "lattice": [\n')
    cols = []
    for j in range(g.dim):
        col = ", ".join(_fnum(x) for x in net.lattice.basis[:, j])
        cols.append("    [%s]" % col)
    parts.append(",\n".join(cols))
    parts.append('\n  ],\n  "edges": [\n')
    erows = []
    for t, h, s in g.edges:
        erows.append('    {"tail": %d, "head": %d, "shift": [%s]}'
                     % (t, h, ", ".join(str(x) for x in s)))
    parts.append(",\n".join(erows))
    parts.append("\n  ]\n}\n")
    return "".join(parts)


def network_from_json(text: str) -> PeriodicNetwork:
    """Parse the canonical JSON network format; unknown keys are ignored."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    try:
        dim = int(doc["dim"])
        vertices = doc["vertices"]
        lattice = np.array(doc["lattice"], dtype=np.float64)
        edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing or malformed network field: {exc}") from exc
    ids = [int(v["id"]) for v in vertices]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate vertex ids")
    index = {vid: i for i, vid in enumerate(sorted(ids))}
    positions = np.zeros((len(ids), dim))
    for v in vertices:
        pos = np.asarray(v["pos"], dtype=np.float64)
        if pos.shape != (dim,):
            raise ValueError(f"vertex {v['id']} position has wrong dimension")
        positions[index[int(v["id"])]] = pos
    if lattice.shape != (dim, dim):
        raise ValueError("lattice must hold dim columns of length dim")
    edge_list = []
    for e in edges:
        shift = [int(x) for x in e["shift"]]
        if len(shift) != dim:
            raise ValueError("edge shift has wrong dimension")
        edge_list.append((index[int(e["tail"])], index[int(e["head"])], shift))
    graph = QuotientGraph.from_edges(dim, len(ids), edge_list)
    # stored column by column; transpose back into a basis matrix
    return PeriodicNetwork(graph, Lattice(lattice.T), positions)


def write_network(net: PeriodicNetwork, path_or_file: str | IO[str]) -> None:
    if hasattr(path_or_file, "write"):
        path_or_file.write(network_to_json(net))
    else:
        with open(path_or_file, "w") as fh:
            fh.write(network_to_json(net))


def read_network(path_or_file: str | IO[str]) -> PeriodicNetwork:
    if hasattr(path_or_file, "read"):
        return network_from_json(path_or_file.read())
    with open(path_or_file) as fh:
        return network_from_json(fh.read())


def export_obj(net: PeriodicNetwork, path_or_file: str | IO[str],
               cells: int = 2) -> int:
    """Write the lift over a cells^n block of translates as OBJ lines.

    Every quotient edge becomes one ``l`` record per lattice translate;
    2-dimensional networks are padded with z = 0.  Returns the number of
    line records written.
    """
    if cells < 1:
        raise ValueError("cells must be at least 1")
    n = net.dim
    if n not in (2, 3):
        raise ValueError("OBJ export supports dimensions 2 and 3 only")
    g = net.graph
    B = net.lattice.basis
    vert_index: dict[tuple, int] = {}
    verts: list[tuple] = []
    lines: list[tuple[int, int]] = []

    def vid(p: np.ndarray) -> int:
        if n == 2:
            p = np.append(p, 0.0)
        key = tuple(round(float(x), 12) for x in p)
        if key not in vert_index:
            vert_index[key] = len(verts) + 1      # OBJ indices are 1-based
            verts.append(key)
        return vert_index[key]

    for k in itertools.product(range(cells), repeat=n):
        kv = np.array(k, dtype=np.float64)
        for t, h, s in g.edges:
            a = net.positions[t] + B @ kv
            b = net.positions[h] + B @ (kv + np.array(s, dtype=np.float64))
            lines.append((vid(a), vid(b)))

    out = ["# periodic network lift, %d^%d cells\n" % (cells, n)]
    for v in verts:
        out.append("v %s %s %s\n" % tuple(format(x, ".12g") for x in v))
    for a, b in lines:
        out.append("l %d %d\n" % (a, b))
    text = "".join(out)
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)
    return len(lines)

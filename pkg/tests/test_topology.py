import numpy as np
import pytest

from perinet import (
    QuotientGraph,
    TopologyClass,
    build_abstract,
    catalog,
    circuit_rank,
    classify,
    enumerate_shifts,
    min_vertex_count,
    validate,
)
from perinet.netcore import Lattice, PeriodicNetwork
from perinet.topology import enumerate_shift_arrays


def test_circuit_rank_bouquet():
    assert circuit_rank(build_abstract("B3", 3)) == 3


def test_circuit_rank_double_bouquet():
    # two vertices, five edges: rank four
    assert circuit_rank(build_abstract("D1,3", 3)) == 4


def test_circuit_rank_dipole():
    assert circuit_rank(build_abstract("D4", 3)) == 3


def test_circuit_rank_disconnected_raises():
    g = QuotientGraph.from_edges(2, 2, [(0, 0, (1, 0)), (1, 1, (0, 1))])
    with pytest.raises(ValueError):
        circuit_rank(g)


def test_classify_catalog():
    assert classify(catalog("pcu", n=3)[0].graph).tag == "B3"
    assert classify(catalog("bnn")[0].graph).tag == "D1,3"
    assert classify(catalog("sqp")[0].graph).tag == "D5"
    assert classify(catalog("cds", t=0.5)[0].graph).tag == "D1,2"
    assert classify(catalog("hcb")[0].graph).tag == "D3"


def test_classify_other():
    # three vertices in a 4-regular ring with doubled edges
    g = QuotientGraph.from_edges(2, 3, [(0, 1, (0, 0)), (0, 1, (1, 0)),
                                        (1, 2, (0, 0)), (1, 2, (0, 1)),
                                        (2, 0, (0, 0)), (2, 0, (1, 1))])
    assert classify(g).kind == "other"


def test_classify_irregular_raises():
    g = QuotientGraph.from_edges(2, 2, [(0, 1, (0, 0)), (0, 0, (1, 0))])
    with pytest.raises(ValueError, match="regular"):
        classify(g)


def test_classify_build_abstract_roundtrip():
    tags = ["B2", "B3", "B5", "D3", "D4", "D5", "D7",
            "D1,2", "D1,3", "D2,2", "D2,3", "D3,4"]
    for tag in tags:
        top = TopologyClass.from_tag(tag)
        g = build_abstract(top, max(top.circuit_rank, 2))
        got = classify(g)
        assert got.tag == top.tag
        assert got.degree == top.degree
        assert got.circuit_rank == top.circuit_rank
        assert got.vertex_count == top.vertex_count


def test_tag_parsing_variants():
    assert TopologyClass.from_tag("d1_3").tag == "D1,3"
    assert TopologyClass.from_tag("b4").tag == "B4"
    with pytest.raises(ValueError):
        TopologyClass.from_tag("X7")


def test_degree_bookkeeping():
    for tag in ("B3", "D5", "D2,3", "D1,2"):
        g = build_abstract(tag, 3)
        deg = g.degrees()
        assert 2 * g.edge_count == int(deg[0]) * g.vertex_count


def test_min_vertex_count_examples():
    count, adm = min_vertex_count(3, 4)
    assert count == 2 and [t.tag for t in adm] == ["D4", "D1,2"]
    count, adm = min_vertex_count(3, 6)
    assert count == 1 and [t.tag for t in adm] == ["B3"]
    count, adm = min_vertex_count(3, 5)
    assert count == 2 and [t.tag for t in adm] == ["D5", "D1,3"]
    count, adm = min_vertex_count(2, 3)
    assert count == 2 and [t.tag for t in adm] == ["D3"]


def test_min_vertex_count_low_degree_region():
    # d <= n: only the counting bound, no structural candidates
    count, adm = min_vertex_count(4, 3)
    assert count == 6 and adm == []
    count, adm = min_vertex_count(3, 3)
    assert count == 4 and adm == []
    count, adm = min_vertex_count(5, 4)
    assert count == 4 and adm == []


def test_min_vertex_count_errors():
    with pytest.raises(ValueError):
        min_vertex_count(3, 2)
    with pytest.raises(ValueError):
        min_vertex_count(1, 4)


def test_build_abstract_structures():
    g = build_abstract("B4", 3)
    assert g.vertex_count == 1 and g.edge_count == 4
    g = build_abstract("D1,2", 2)
    assert g.vertex_count == 2 and g.edge_count == 4
    assert classify(g).degree == 4
    g = build_abstract("D5", 4)
    assert g.vertex_count == 2 and g.edge_count == 5
    with pytest.raises(ValueError):
        build_abstract("other", 3)


def _as_sets(shift_list):
    return [frozenset(map(tuple, np.asarray(s).tolist())) for s in shift_list]


def test_enumerate_contains_standard_bouquet():
    arrays = enumerate_shift_arrays(build_abstract("B3", 3), 3, 1)
    target = frozenset({(1, 0, 0), (0, 1, 0), (0, 0, 1)})
    assert target in _as_sets(arrays)


def test_enumerate_contains_dia_pattern():
    arrays = enumerate_shift_arrays(build_abstract("D4", 3), 3, 1)
    sets = _as_sets(arrays)
    dia = frozenset({(0, 0, 0), (-1, 0, 0), (0, -1, 0), (0, 0, -1)})
    neg = frozenset({(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)})
    assert dia in sets or neg in sets


def test_enumerate_contains_sqp_pattern():
    arrays = enumerate_shift_arrays(build_abstract("D5", 3), 3, 1)
    sets = _as_sets(arrays)
    sqp = frozenset({(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 1)})
    neg = frozenset({(0, 0, 0), (-1, 0, 0), (0, -1, 0), (0, 0, -1), (-1, 1, -1)})
    assert sqp in sets or neg in sets


def test_enumerate_all_valid_and_deduplicated():
    for tag, n in [("B3", 3), ("D4", 3), ("D1,2", 3), ("D3", 2)]:
        graphs = enumerate_shifts(build_abstract(tag, n), n, 1)
        assert graphs
        seen = set()
        for g in graphs:
            rep = validate(PeriodicNetwork(g, Lattice(np.eye(n)),
                                           np.zeros((g.vertex_count, n))))
            assert rep.rank_full and rep.lift_connected
            key = tuple(map(tuple, g.shifts.tolist()))
            neg = tuple(map(tuple, (-g.shifts).tolist()))
            assert key not in seen and neg not in seen
            seen.add(key)


def test_enumerate_assignment_counts():
    # frozen counts for the canonical one- and two-vertex skeletons
    expect = {("B3", 3): 145, ("D4", 3): 580, ("D1,2", 3): 870,
              ("D5", 3): 5590, ("D3", 2): 10}
    for (tag, n), count in expect.items():
        assert len(enumerate_shift_arrays(build_abstract(tag, n), n, 1)) == count


def test_enumerate_guard_trips():
    with pytest.raises(RuntimeError, match="exceeds"):
        enumerate_shift_arrays(build_abstract("D5", 3), 3, 3)


def test_admissible_topologies_have_assignments():
    # existence of a full-rank, lattice-generating assignment for every
    # admissible type; lazily, so the large n = 4 spaces stay cheap
    from itertools import islice

    from perinet.topology import iter_shift_arrays

    for n in (2, 3, 4):
        for d in range(n + 1, 2 * n + 1):
            _, admissible = min_vertex_count(n, d)
            assert admissible
            for top in admissible:
                skeleton = build_abstract(top, n)
                try:
                    arrays = list(islice(iter_shift_arrays(skeleton, n, 1), 1))
                except RuntimeError:
                    continue
                assert arrays, f"no assignment for {top.tag} at n={n}"
                g = QuotientGraph(n, top.vertex_count, skeleton.tails,
                                  skeleton.heads, arrays[0])
                assert circuit_rank(g) >= n

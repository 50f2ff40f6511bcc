import io
import json
import math

import numpy as np
import pytest

from perinet import catalog, length, length_quotient, volume
from perinet.cli import run
from perinet.io import export_obj, network_from_json, network_to_json, read_network, write_network


def test_json_roundtrip_preserves_measures():
    for name, params in [("dia", {}), ("bnn", {}), ("sqp", {}),
                         ("cds", {"t": 1 / 3}), ("hcb", {}),
                         ("simplex_net", {"n": 4})]:
        net, _ = catalog(name, **params)
        back = network_from_json(network_to_json(net))
        assert abs(length(back) - length(net)) <= 1e-12 * length(net)
        assert abs(volume(back) - volume(net)) <= 1e-12 * volume(net)
        assert np.array_equal(back.graph.shifts, net.graph.shifts)


def test_json_writer_stable():
    net, _ = catalog("bnn")
    assert network_to_json(net) == network_to_json(net)


def test_json_reader_ignores_extra_keys():
    net, _ = catalog("dia")
    doc = json.loads(network_to_json(net))
    doc["expected_quotient"] = 1.23
    doc["note"] = "extra"
    back = network_from_json(json.dumps(doc))
    assert length(back) == pytest.approx(length(net), rel=1e-15)


def test_json_reader_rejects_malformed():
    with pytest.raises(ValueError, match="JSON"):
        network_from_json("{not json")
    with pytest.raises(ValueError, match="field"):
        network_from_json('{"dim": 3}')
    net, _ = catalog("dia")
    doc = json.loads(network_to_json(net))
    doc["edges"][0]["shift"] = [1, 0]
    with pytest.raises(ValueError, match="dimension"):
        network_from_json(json.dumps(doc))


def test_json_file_io(tmp_path):
    net, _ = catalog("sqp")
    path = tmp_path / "sqp.json"
    write_network(net, str(path))
    back = read_network(str(path))
    assert length_quotient(back) == pytest.approx(50.625, rel=1e-12)


def test_obj_export_pcu_two_cells(tmp_path):
    net, _ = catalog("pcu", n=3)
    path = tmp_path / "pcu.obj"
    count = export_obj(net, str(path), cells=2)
    text = path.read_text()
    lines = [l for l in text.splitlines() if l.startswith("l ")]
    verts = [l for l in text.splitlines() if l.startswith("v ")]
    assert count == 24 and len(lines) == 3 * 8
    for v in verts:
        coords = [float(x) for x in v.split()[1:]]
        assert all(abs(c - round(c)) <= 1e-12 for c in coords)


def test_obj_export_plane_padded():
    net, _ = catalog("hcb")
    buf = io.StringIO()
    export_obj(net, buf, cells=1)
    assert all(line.split()[3] == "0" for line in buf.getvalue().splitlines()
               if line.startswith("v "))


def test_obj_export_dimension_limit():
    net, _ = catalog("simplex_net", n=4)
    with pytest.raises(ValueError, match="dimension"):
        export_obj(net, io.StringIO())


# ---------------------------------------------------------------------------
# CLI


def test_cli_catalog_pipes_into_eval(tmp_path, capsys):
    assert run(["catalog", "--name", "sqp"]) == 0
    doc = capsys.readouterr().out
    assert json.loads(doc)["expected_quotient"] == pytest.approx(50.625)
    path = tmp_path / "net.json"
    path.write_text(doc)
    assert run(["eval", str(path)]) == 0
    out = capsys.readouterr().out
    assert "L^3/V = 50.625" in out
    assert "valid = True" in out


def test_cli_catalog_lists_all(capsys):
    assert run(["catalog"]) == 0
    out = capsys.readouterr().out
    for name in ("hcb", "sql", "dia", "cds", "bnn", "sqp", "pcu"):
        assert name in out


def test_cli_catalog_with_param(capsys):
    assert run(["catalog", "--name", "cds", "--param", "0.25"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["expected_quotient"] == pytest.approx(27.0)
    assert run(["catalog", "--name", "pcu", "--param", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["expected_quotient"] == pytest.approx(256.0)


def test_cli_table(capsys):
    assert run(["table", "--dim", "3"]) == 0
    out = capsys.readouterr().out
    roots = {}
    for line in out.splitlines()[1:]:
        parts = line.split()
        roots[parts[0]] = float(parts[2])
    assert abs(roots["dia"] - 2.75) <= 0.01
    assert abs(roots["cds"] - 3.00) <= 0.01
    assert abs(roots["bnn"] - 3.60) <= 0.01
    assert abs(roots["sqp"] - 3.70) <= 0.01
    assert abs(roots["pcu"] - 3.00) <= 0.01


def test_cli_table_wrong_dim(capsys):
    assert run(["table", "--dim", "2"]) == 2


def test_cli_classify(tmp_path, capsys):
    net, _ = catalog("bnn")
    path = tmp_path / "bnn.json"
    write_network(net, str(path))
    assert run(["classify", str(path)]) == 0
    out = capsys.readouterr().out
    assert "topology = D1,3" in out
    assert "circuit_rank = 4" in out
    assert "irreducible = True" in out


def test_cli_verify(tmp_path, capsys):
    net, _ = catalog("dia")
    path = tmp_path / "dia.json"
    write_network(net, str(path))
    assert run(["verify", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["theorem"] == "dipole-simplex"
    assert abs(doc["slack"]) <= 1e-9
    assert doc["equality_certificate"]["passed"] is True


def test_cli_export(tmp_path, capsys):
    net, _ = catalog("pcu", n=3)
    path = tmp_path / "pcu.json"
    write_network(net, str(path))
    out_obj = tmp_path / "pcu.obj"
    assert run(["export", str(path), "--obj", str(out_obj), "--cells", "2"]) == 0
    assert "24 line records" in capsys.readouterr().out
    assert out_obj.exists()


def test_cli_optimize_deterministic(tmp_path, capsys):
    args = ["optimize", "--topology", "D3", "--dim", "2", "--seed", "3",
            "--restarts", "8", "--out", str(tmp_path / "d3.json")]
    assert run(args) == 0
    first = capsys.readouterr().out
    assert run(args) == 0
    second = capsys.readouterr().out
    assert first == second
    assert f"best {2 * math.sqrt(3):.6f}"[:11] in first
    back = read_network(str(tmp_path / "d3.json"))
    assert length_quotient(back) == pytest.approx(2 * math.sqrt(3), rel=1e-6)


def test_cli_optimize_documented_example(tmp_path, capsys):
    out = tmp_path / "d4.json"
    assert run(["optimize", "--topology", "D4", "--dim", "3", "--seed", "7",
                "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    value = float(printed.split()[1])
    assert abs(value - 20.7846097) <= 1e-4 * 20.7846097
    back = read_network(str(out))
    assert length_quotient(back) == pytest.approx(value, rel=1e-9)


def test_cli_catalog_bad_param(capsys):
    assert run(["catalog", "--name", "cds", "--param", "zebra"]) == 1
    assert "cannot parse" in capsys.readouterr().err


def test_cli_bad_file(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{oops")
    assert run(["eval", str(path)]) == 1
    assert "cannot read network" in capsys.readouterr().err


def test_cli_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2


def test_cli_eval_invalid_network_exit_code(tmp_path, capsys):
    net, _ = catalog("pcu", n=3)
    doc = json.loads(network_to_json(net))
    doc["edges"][2]["shift"] = [0, 0, 2]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run(["eval", str(path)]) == 1
    out = capsys.readouterr().out
    assert "violation" in out

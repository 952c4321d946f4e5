"""CLI commands end to end through typer's runner."""

from __future__ import annotations

import json

import pytest
from typer.testing import CliRunner

from src.main import EXIT_FAILED, EXIT_USAGE, app

runner = CliRunner()

K3 = "3 5 0 -\n0: 1 2\n1: 2 0\n2: 0 1\n"
P3 = "3 5 0 -\n0: 1\n1: 0 2\n2: 1\n"
C5 = "# five-cycle\n5 5 0 -\n0: 1 4\n1: 2 0\n2: 3 1\n3: 4 2\n4: 0 3\n"


def _report(result) -> dict:
    text = result.stdout
    return json.loads(text[text.index("{\n"):])


@pytest.fixture
def write(tmp_path):
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def test_analyze(write):
    result = runner.invoke(app, ["analyze", write("k3.rotsys", K3)])
    assert result.exit_code == 0, result.output
    report = _report(result)
    assert report["at_number"] == 3
    assert report["face_degrees"] == [3, 3]
    assert report["checks"][0] == {"name": "in_class", "passed": True, "witness": {}}
    assert report["inputs"][write("k3.rotsys", K3)].startswith("sha256:")


def test_analyze_outside_class_fails(write):
    result = runner.invoke(app, ["analyze", write("c5.rotsys", C5)])
    assert result.exit_code == EXIT_FAILED
    assert _report(result)["configuration"] is None
    assert runner.invoke(app, ["analyze", write("c5.rotsys", C5), "--l", "6"]).exit_code == 0


def test_usage_errors(write, tmp_path):
    assert runner.invoke(app, ["analyze", str(tmp_path / "missing.rotsys")]).exit_code == EXIT_USAGE
    bad = write("bad.rotsys", "3 5 0 -\n0: 1\n1: 2\n")
    assert runner.invoke(app, ["analyze", bad]).exit_code == EXIT_USAGE
    assert runner.invoke(app, ["analyze", write("k3.rotsys", K3), "--l", "9"]).exit_code == EXIT_USAGE
    assert runner.invoke(app, ["extract", write("c5.rotsys", C5)]).exit_code == EXIT_USAGE


def test_extract_writes_certificate(write, tmp_path):
    out = tmp_path / "certs" / "k3.json"
    result = runner.invoke(app, ["extract", write("k3.rotsys", K3), "-o", str(out)])
    assert result.exit_code == 0, result.output
    report = _report(result)
    assert report["passed"] is True
    assert {c["name"] for c in report["checks"]} == {
        "matching", "orientation_base", "out_degrees", "diff_nonzero",
    }
    assert json.loads(out.read_text()) == report["certificate"]


def test_verify_orientation(write):
    graph = write("k3.rotsys", K3)
    good = runner.invoke(app, ["verify-orientation", graph, write("good.arcs", "1>0\n2>0\n2>1\n")])
    assert good.exit_code == 0, good.output
    assert _report(good)["diff"] == 1
    bad = runner.invoke(app, ["verify-orientation", graph, write("bad.arcs", "0>1\n0>2\n1>2\n")])
    assert bad.exit_code == EXIT_FAILED
    report = _report(bad)
    assert report["good"] is False
    assert report["root_out_degree"] == 2
    malformed = runner.invoke(app, ["verify-orientation", graph, write("odd.arcs", "1-0\n")])
    assert malformed.exit_code == EXIT_USAGE


def test_verify_orientation_reports_left_out_edges(write):
    graph = write("k3.rotsys", K3)
    # 1-2 left out: a matching avoiding the root
    minus_matching = runner.invoke(app, ["verify-orientation", graph, write("gm.arcs", "1>0\n2>0\n")])
    assert minus_matching.exit_code == 0, minus_matching.output
    checks = {c["name"]: c for c in _report(minus_matching)["checks"]}
    assert checks["missing_edges_form_matching"] == {
        "name": "missing_edges_form_matching", "passed": True, "witness": {"missing": [[1, 2]]},
    }
    # 0-2 and 1-2 left out: they share 2 and touch the root
    sparse = runner.invoke(app, ["verify-orientation", graph, write("one.arcs", "1>0\n")])
    assert sparse.exit_code == EXIT_FAILED
    report = _report(sparse)
    assert report["good"] is False
    missing = next(c for c in report["checks"] if c["name"] == "missing_edges_form_matching")
    assert missing["passed"] is False
    assert missing["witness"]["missing"] == [[0, 2], [1, 2]]


def test_detect_all(write):
    result = runner.invoke(app, ["detect", write("p3.rotsys", P3), "--all"])
    assert result.exit_code == 0, result.output
    report = _report(result)
    assert report["configuration"]["kind"] == "LowDegreeVertex"
    assert report["instances"][0] == report["configuration"]


def test_discharge(write):
    result = runner.invoke(app, ["discharge", write("k3.rotsys", K3)])
    assert result.exit_code == 0, result.output
    report = _report(result)
    assert report["audit"]["passed"] is True
    table = runner.invoke(app, ["discharge", write("k3.rotsys", K3), "--format", "table"])
    assert table.exit_code == 0
    yaml = runner.invoke(app, ["discharge", write("k3.rotsys", K3), "--format", "yaml"])
    assert yaml.exit_code == EXIT_USAGE
    bad_batch = runner.invoke(app, ["certify-batch", "--l", "5", "--max-n", "2", "--format", "csv"])
    assert bad_batch.exit_code == EXIT_USAGE


def test_enumerate(tmp_path):
    out = tmp_path / "corpus"
    result = runner.invoke(app, ["enumerate", "--l", "5", "--max-n", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "manifest.json").read_text())
    # K1, K2, P3 and K3 with every outer face and root
    assert manifest["count"] == 1 + 2 + 3 + 6
    assert len(list(out.glob("*.rotsys"))) == manifest["count"]
    first = runner.invoke(app, ["analyze", str(out / manifest["files"][0])])
    assert first.exit_code == 0
    assert runner.invoke(app, ["enumerate", "--l", "4", "--max-n", "3", "--out", str(out)]).exit_code == EXIT_USAGE


def test_certify_batch():
    result = runner.invoke(app, ["certify-batch", "--l", "6", "--max-n", "3", "--jobs", "2"])
    assert result.exit_code == 0, result.output
    report = _report(result)
    assert report["passed"] is True
    assert report["stats"]["graphs"] == 12


def test_visualize(write, tmp_path):
    graph = write("k3.rotsys", K3)
    cert = tmp_path / "k3.json"
    assert runner.invoke(app, ["extract", graph, "-o", str(cert)]).exit_code == 0
    png = tmp_path / "k3.png"
    result = runner.invoke(app, ["visualize", graph, str(cert), "-o", str(png)])
    assert result.exit_code == 0, result.output
    assert png.stat().st_size > 0

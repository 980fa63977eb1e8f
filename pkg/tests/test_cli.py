import json

import pytest

import lcmst.main as cli
from lcmst.api.schemas import ExperimentConfig, GeneratorKind, ProblemKind
from lcmst.graph.instance import make_instance
from lcmst.harness.generators import generate_instance
from lcmst.utils.io import read_instance, write_instance

GST_TEXT = """\
p gst 4 4 1 0
e 0 1 0 1
e 1 2 0 1
e 0 3 0 5
e 2 3 0 1
g 2
g 3
"""


@pytest.fixture(autouse=True)
def keep_test_logging(monkeypatch):
    monkeypatch.setattr(cli, "setup_logging", lambda level: None)


@pytest.fixture
def triangle_file(tmp_path, triangle):
    return write_instance(triangle, tmp_path / "triangle.txt")


def test_gen_writes_one_file_per_seed(tmp_path):
    code = cli.main(["gen", "--generator", "grid", "--size", "9", "--seed", "7", "--count", "2", "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    config = ExperimentConfig(generator=GeneratorKind.GRID, size=9)
    for seed in (7, 8):
        assert read_instance(tmp_path / f"grid-{seed}.txt") == generate_instance(config, seed)


def test_solve_exact_prints_the_report(triangle_file, capsys):
    assert cli.main(["solve-exact", str(triangle_file)]) == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["variant"] == "exact"
    assert report["weight"] == 2
    assert report["edges"] == [[0, 1], [0, 2]]


def test_invalid_instance_exits_with_error(tmp_path, capsys):
    path = tmp_path / "broken.txt"
    path.write_text("p lcmst 2 1 1 0\ne 0 1 1\n", encoding="utf-8")
    assert cli.main(["solve-exact", str(path)]) == cli.EXIT_ERROR
    assert "line 2" in capsys.readouterr().err


def test_solve_writes_reports_and_hierarchy(triangle_file, triangle, tmp_path):
    out = tmp_path / "reports"
    code = cli.main(["solve", str(triangle_file), "--algo", "main", "--out", str(out), "--dump-hierarchy"])
    assert code == cli.EXIT_OK
    assert (out / f"{triangle.instance_id}-main.json").exists()
    assert (out / f"{triangle.instance_id}.hierarchy.json").exists()
    assert (out / f"{triangle.instance_id}.hierarchy.dot").read_text().startswith("digraph")


def test_solve_without_instance_runs_an_experiment(tmp_path, capsys):
    out = tmp_path / "batch"
    code = cli.main(
        ["solve", "--generator", "gadget-fig1-analog", "--size", "4", "--algo", "main", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    assert capsys.readouterr().out.strip() == str(out / "summary.csv")
    assert (out / "summary.csv").exists()


def test_user_budget_requires_a_value(triangle_file):
    with pytest.raises(SystemExit):
        cli.main(["solve", str(triangle_file), "--budget", "user"])


def test_reduce_with_certificate(tmp_path, capsys):
    source = tmp_path / "groups.txt"
    source.write_text(GST_TEXT, encoding="utf-8")
    out = tmp_path / "groups-lcmst.txt"
    assert cli.main(["reduce", str(source), "--to", "lcmst", "--certify", "--out", str(out)]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["reduction"] == "gst->lcmst"
    assert payload["source_opt"] == payload["target_opt"] == 3
    assert payload["violations"] == []
    assert read_instance(out).kind == ProblemKind.LCMST
    sidecar = json.loads((tmp_path / "groups-lcmst.txt.map.json").read_text())
    assert sidecar["source_opt"] == 3


def test_reduce_normalizes_overlapping_groups(tmp_path):
    source = tmp_path / "overlap.txt"
    source.write_text("p gst 3 2 1 0\ne 0 1 0 1\ne 1 2 0 1\ng 1 2\ng 2\n", encoding="utf-8")
    out = tmp_path / "overlap-lcmst.txt"
    assert cli.main(["reduce", str(source), "--to", "lcmst", "--normalize-groups", "--out", str(out)]) == cli.EXIT_OK
    assert cli.main(["reduce", str(source), "--to", "lcmst", "--out", str(out)]) == cli.EXIT_ERROR


def test_reduce_rejects_a_mismatched_source_kind(triangle_file, tmp_path):
    code = cli.main(["reduce", str(triangle_file), "--from", "gst", "--to", "lcmst", "--out", str(tmp_path / "x.txt")])
    assert code == cli.EXIT_ERROR


def test_audit_runs_the_full_suite(triangle_file, triangle, capsys):
    assert cli.main(["audit", str(triangle_file), "--algo", "main"]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["instance_id"] == triangle.instance_id
    assert payload["asserted"] == 0


def test_lcst_reduction_from_file(tmp_path, capsys):
    instance = make_instance(
        ProblemKind.LCST, 3, [(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 2, 0)], 0, 1, terminals=[1]
    )
    source = write_instance(instance, tmp_path / "lcst.txt")
    out = tmp_path / "lcst-lcmst.txt"
    assert cli.main(["reduce", str(source), "--from", "lcst", "--to", "lcmst", "--out", str(out)]) == cli.EXIT_OK
    assert read_instance(out).vertex_count == 4

import json
from pathlib import Path

import pytest

from fakemark.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, dispatch
from fakemark.store import load_table

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = dispatch([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pipeline(tmp_path, capsys):
    db = tmp_path / "db.csv"
    meta = tmp_path / "meta.json"
    assert run(capsys, "sample", "--n", 200, "--seed", 1, "--out", db)[0] == EXIT_OK
    assert run(capsys, "assign", "--users", 3, "--x", 2, "--out", meta)[0] == EXIT_OK
    assert run(capsys, "genfake", "--db", db, "--meta", meta, "--key-column", "id")[0] == EXIT_OK
    return tmp_path, db, meta


def test_no_arguments_is_a_usage_error(capsys):
    code, out, err = run(capsys)
    assert code == EXIT_USAGE != 0
    assert "usage" in err.lower()


def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE


def test_assign_three_users(tmp_path, capsys):
    meta = tmp_path / "meta.json"
    code, out, _ = run(capsys, "assign", "--users", 3, "--out", meta)
    assert code == EXIT_OK
    doc = json.loads(meta.read_text())
    assert [e["watermark"] for e in doc["codebook"]] == ["00", "01", "10"]
    assert doc["fake_tuples"] is None


def test_assign_json_output_is_golden(tmp_path, capsys):
    code, out, _ = run(capsys, "assign", "--user-ids", "alice,bob,carol", "--format", "json", "--out", tmp_path / "m.json")
    assert code == EXIT_OK
    assert json.loads(out) == json.loads((GOLDEN / "assign.json").read_text())


def test_full_pipeline_prints_user(pipeline, capsys):
    tmp, db, meta = pipeline
    marked, attacked = tmp / "marked.csv", tmp / "attacked.csv"
    assert run(capsys, "embed", "--db", db, "--meta", meta, "--user", "user002", "--out", marked)[0] == EXIT_OK
    assert load_table(marked).n == 202
    assert run(capsys, "attack", "--db", marked, "--p", 0, "--out", attacked)[0] == EXIT_OK
    code, out, _ = run(capsys, "extract", "--db", attacked, "--meta", meta, "--format", "text")
    assert code == EXIT_OK
    assert "exact match: user002" in out


def test_extract_json_is_golden(pipeline, capsys):
    tmp, db, meta = pipeline
    marked = tmp / "marked.csv"
    run(capsys, "embed", "--db", db, "--meta", meta, "--user", "user001", "--out", marked)
    code, out, _ = run(capsys, "extract", "--db", marked, "--meta", meta)
    assert code == EXIT_OK
    assert json.loads(out) == json.loads((GOLDEN / "extract.json").read_text())


def test_embed_is_deterministic(pipeline, capsys):
    tmp, db, meta = pipeline
    a, b = tmp / "a.csv", tmp / "b.csv"
    run(capsys, "embed", "--db", db, "--meta", meta, "--user", "user001", "--out", a)
    run(capsys, "embed", "--db", db, "--meta", meta, "--user", "user001", "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_embed_without_fakes_is_a_validation_error(tmp_path, capsys):
    db, meta = tmp_path / "db.csv", tmp_path / "m.json"
    run(capsys, "sample", "--n", 50, "--out", db)
    run(capsys, "assign", "--users", 3, "--out", meta)
    code, _, err = run(capsys, "embed", "--db", db, "--meta", meta, "--user", "user000", "--out", tmp_path / "o.csv")
    assert code == EXIT_VALIDATION and err


def test_unknown_user_is_a_validation_error(pipeline, capsys):
    tmp, db, meta = pipeline
    code = run(capsys, "embed", "--db", db, "--meta", meta, "--user", "mallory", "--out", tmp / "o.csv")[0]
    assert code == EXIT_VALIDATION


def test_missing_file_is_an_io_error(tmp_path, capsys):
    code = run(capsys, "attack", "--db", tmp_path / "nope.csv", "--p", 0.1, "--out", tmp_path / "o.csv")[0]
    assert code == EXIT_IO


def test_bad_ratio_is_a_validation_error(pipeline, capsys):
    tmp, db, _ = pipeline
    assert run(capsys, "attack", "--db", db, "--p", 2, "--out", tmp / "o.csv")[0] == EXIT_VALIDATION


def test_ragged_csv_is_a_validation_error(tmp_path, capsys):
    db = tmp_path / "bad.csv"
    db.write_text("a,b\n1,2\n3\n")
    assert run(capsys, "attack", "--db", db, "--p", 0.1, "--out", tmp_path / "o.csv")[0] == EXIT_VALIDATION


def test_unreachable_generator_is_an_io_error(pipeline, capsys):
    tmp, db, meta = pipeline
    code = run(capsys, "genfake", "--db", db, "--meta", meta, "--generator", "external",
               "--endpoint", "http://127.0.0.1:9/x", "--timeout", 2)[0]
    assert code == EXIT_IO


def test_theory_csv(capsys):
    code, out, _ = run(capsys, "theory", "--p", "0.5", "--x", 5)
    lines = out.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 2
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["L"] == "6" and float(row["ni_bound"]) == 15


def test_transparency_experiment(capsys):
    code, out, _ = run(capsys, "experiment", "transparency")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 11


def test_robustness_experiment_with_config(tmp_path, capsys):
    config = tmp_path / "grid.json"
    config.write_text(json.dumps({"x_values": [2], "p_values": [0.0, 0.5], "trials": 2, "n": 300}))
    out_csv, plot = tmp_path / "r.csv", tmp_path / "plot.csv"
    code = run(capsys, "experiment", "robustness", "--config", config, "--out", out_csv, "--plot-data", plot)[0]
    assert code == EXIT_OK
    assert len(out_csv.read_text().splitlines()) == 1 + 2 * 2
    assert len(plot.read_text().splitlines()) == 1 + 2


def test_baseline_commands(pipeline, capsys):
    tmp, db, _ = pipeline
    bmeta, marked = tmp / "bmeta.json", tmp / "bmarked.csv"
    code = run(capsys, "baseline-embed", "--db", db, "--meta", bmeta, "--watermark", "101",
               "--x", 2, "--key-column", "id", "--out", marked)[0]
    assert code == EXIT_OK
    assert load_table(marked).n == 206
    code, out, _ = run(capsys, "baseline-extract", "--db", marked, "--meta", bmeta)
    assert code == EXIT_OK
    assert json.loads(out) == json.loads((GOLDEN / "baseline_extract.json").read_text())

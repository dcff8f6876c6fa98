import json

import pytest
from click.testing import CliRunner

from gsdalloc.cli import main
from gsdalloc.persist import (
    load_model,
    model_to_dict,
    save_model,
    save_project,
    save_rules,
)

RULES_TEXT = (
    "r1: coupling & cultural_differences -> communication_problems\n"
    "r2: time_zone_difference >= high -> communication_problems\n"
)

GOALS_DOC = {
    "goals": [{"id": "project_costs", "polarity": "cost"}],
    "links": [
        {"source": "communication_problems", "target": "productivity", "sign": -1},
        {"source": "site_experience", "target": "productivity", "sign": 1},
        {"source": "productivity", "target": "project_costs", "sign": -1},
    ],
    "factors": [
        {"id": "coupling", "scope": "task_pair"},
        {"id": "cultural_differences", "display_name": "cultural differences", "scope": "site_pair"},
        {"id": "time_zone_difference", "display_name": "time zone difference", "scope": "site_pair"},
        {"id": "site_experience", "display_name": "site experience", "scope": "site"},
    ],
}


@pytest.fixture
def workdir(tmp_path, alloc_model, alloc_project, alloc_rules):
    save_model(tmp_path / "model.json", alloc_model)
    save_project(tmp_path / "project.json", alloc_project)
    save_rules(tmp_path / "rules.txt", alloc_rules)
    (tmp_path / "goals.json").write_text(json.dumps(GOALS_DOC))
    return tmp_path


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_derive_model_writes_equivalent_model(workdir, alloc_model):
    out = workdir / "derived.json"
    result = invoke(
        "derive-model", "--rules", workdir / "rules.txt", "--goals", workdir / "goals.json", "-o", out
    )
    assert result.exit_code == 0, result.output
    assert "nodes" in result.output
    assert model_to_dict(load_model(out)) == model_to_dict(alloc_model)


def test_derive_model_domain_error_exit_2(workdir):
    (workdir / "orphan.txt").write_text("lonely_factor -> unreachable_problem\n")
    out = workdir / "x.json"
    result = invoke(
        "derive-model",
        "--rules", workdir / "orphan.txt",
        "--goals", workdir / "goals.json",
        "-o", out,
    )
    assert result.exit_code == 2
    assert "UNLINKED_PROBLEM" in result.output


def test_validate_ok(workdir):
    result = invoke(
        "validate", "--model", workdir / "model.json", "--project", workdir / "project.json"
    )
    assert result.exit_code == 0
    assert result.output.strip() == "ok"


def test_validate_reports_findings(workdir):
    doc = json.loads((workdir / "model.json").read_text())
    doc["goal_weights"]["project_costs"] = 0.25
    (workdir / "broken.json").write_text(json.dumps(doc))
    result = invoke("validate", "--model", workdir / "broken.json")
    assert result.exit_code == 1
    assert "WEIGHTS_NOT_NORMALIZED" in result.output


def test_validate_schema_error(workdir):
    (workdir / "junk.json").write_text('{"schema_version": 1}')
    result = invoke("validate", "--model", workdir / "junk.json")
    assert result.exit_code == 2
    assert "error [SCHEMA_ERROR]" in result.output


def test_validate_json_format(workdir):
    result = invoke("validate", "--model", workdir / "model.json", "--format", "json")
    assert result.exit_code == 0
    assert json.loads(result.output) == {"ok": True, "findings": []}


def test_suggest_text_and_record(workdir):
    record_path = workdir / "decision.json"
    result = invoke(
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
        "--runs", 60,
        "--seed", 42,
        "--top", 3,
        "-o", record_path,
        "--timestamp", "2026-02-02T00:00:00+00:00",
    )
    assert result.exit_code == 0, result.output
    assert "runs=60 seed=42" in result.output
    assert "#1 freq=" in result.output
    assert record_path.exists()
    record = json.loads(record_path.read_text())
    assert record["created_at"] == "2026-02-02T00:00:00+00:00"
    assert record["runs"] == 60
    assert "rules" in record and "selected" in record and "risks" in record


def test_suggest_json_format(workdir):
    result = invoke(
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--runs", 20,
        "--seed", 1,
        "--format", "json",
    )
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["runs"] == 20
    assert doc["suggestions"]


def test_suggest_deterministic_output(workdir):
    args = (
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--runs", 30,
        "--seed", 5,
        "--format", "json",
    )
    assert invoke(*args).output == invoke(*args).output


def test_risks_with_explicit_assignment(workdir):
    result = invoke(
        "risks",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
        "--assignment", "design_a=munich, design_b=bangalore, development=bangalore",
    )
    assert result.exit_code == 0
    assert "communication_problems" in result.output
    lines = result.output.splitlines()
    assert "munich:" in lines and "bangalore:" in lines

    colocated = invoke(
        "risks",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
        "--assignment", "design_a=boston,design_b=boston,development=boston",
    )
    assert colocated.output.strip() == "no findings"


def test_risks_json_from_decision(workdir):
    record_path = workdir / "decision.json"
    invoke(
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--runs", 40,
        "--seed", 2,
        "-o", record_path,
    )
    result = invoke(
        "risks",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
        "--from-decision", record_path,
        "--format", "json",
    )
    assert result.exit_code == 0
    json.loads(result.output)


def test_risks_requires_exactly_one_source(workdir):
    result = invoke(
        "risks",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
    )
    assert result.exit_code == 2


def test_replay_match_and_mismatch(workdir):
    record_path = workdir / "decision.json"
    invoke(
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--runs", 25,
        "--seed", 8,
        "-o", record_path,
    )
    result = invoke("replay", "--from-decision", record_path)
    assert result.exit_code == 0
    assert "match" in result.output

    record = json.loads(record_path.read_text())
    record["suggestions"]["suggestions"][0]["wins"] += 1
    (workdir / "forged.json").write_text(json.dumps(record))
    result = invoke("replay", "--from-decision", workdir / "forged.json")
    assert result.exit_code == 1
    assert "MISMATCH" in result.output


def test_export_xml(workdir):
    out = workdir / "model.xml"
    result = invoke("export-xml", "--in", workdir / "model.json", "-o", out, "--tag", "model")
    assert result.exit_code == 0
    text = out.read_text()
    assert text.startswith("<?xml")
    assert "<model" in text


def test_backend_command():
    result = invoke("backend")
    assert result.exit_code == 0
    assert result.output.strip() in ("numba", "numpy")


def test_rule_parse_error_exit_code(workdir):
    (workdir / "bad.txt").write_text("a >> b -> p\n")
    result = invoke(
        "risks",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "bad.txt",
        "--assignment", "design_a=munich,design_b=munich,development=munich",
    )
    assert result.exit_code == 2
    assert "error [PARSE_ERROR]" in result.output


def test_compare_tabulates_risk_counts(workdir):
    record_path = workdir / "decision.json"
    invoke(
        "suggest",
        "--model", workdir / "model.json",
        "--project", workdir / "project.json",
        "--rules", workdir / "rules.txt",
        "--runs", 30,
        "--seed", 5,
        "-o", record_path,
    )
    result = invoke("compare", "--from-decision", record_path, "--top", 4, "--format", "json")
    assert result.exit_code == 0, result.output
    rows = json.loads(result.output)
    assert 0 < len(rows) <= 4
    assert [row["rank"] for row in rows] == list(range(1, len(rows) + 1))
    for row in rows:
        r = row["risks"]
        assert r["total"] == r["high"] + r["medium"] + r["low"]

    text = invoke("compare", "--from-decision", record_path, "--top", 2)
    assert text.exit_code == 0
    assert text.output.splitlines()[0].startswith("#1 ")
    assert "risks=" in text.output

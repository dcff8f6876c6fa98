"""Command line front end.

Exit codes: 0 on success, 1 when a check produces findings (validation
findings, replay mismatch), 2 for runtime and usage errors.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import _kernels, persist
from .errors import Finding, GsdallocError, SchemaError
from .model import validate_model
from .optimizer import DEFAULT_RUNS, SuggestionList, run_simulation
from .project import validate_characterization
from .risks import analyze_risks
from .skeleton import derive_causal_skeleton


def _domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GsdallocError as exc:
            click.echo(f"error [{exc.code}]: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main() -> None:
    """Risk-aware task-to-site allocation advisor."""


@main.command("derive-model")
@click.option("--rules", "rules_path", required=True, type=click.Path(exists=True))
@click.option("--goals", "goals_path", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", "output_path", required=True, type=click.Path())
@_domain_errors
def derive_model(rules_path: str, goals_path: str, output_path: str) -> None:
    """Build a causal model skeleton from a rule file and a goal file."""
    ruleset = persist.load_rules(rules_path)
    goals, links, factors, node_options = persist.load_goal_file(goals_path)
    model = derive_causal_skeleton(ruleset, goals, links, factors or None, node_options)
    persist.save_model(output_path, model)
    click.echo(f"wrote {output_path} ({len(model.nodes)} nodes, {len(model.edges)} edges)")


def _echo_findings(findings: list[Finding]) -> None:
    for f in findings:
        click.echo(str(f))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--project", "project_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_domain_errors
def validate(model_path: str, project_path: str | None, fmt: str) -> None:
    """Check a model, and optionally a project against it."""
    model = persist.load_model(model_path)
    findings = validate_model(model)
    if project_path and not findings:
        project = persist.load_project(project_path, model)
        findings = validate_characterization(model, project)
    if fmt == "json":
        click.echo(
            persist.canonical_json(
                {"ok": not findings, "findings": persist.findings_to_list(findings)}
            )
        )
    elif findings:
        _echo_findings(findings)
    else:
        click.echo("ok")
    if findings:
        sys.exit(1)


def _echo_suggestions(result: SuggestionList, top: int) -> None:
    click.echo(f"runs={result.runs} seed={result.seed} distinct={len(result.suggestions)}")
    for rank, s in enumerate(result.top(top), start=1):
        placing = " ".join(f"{t}={site}" for t, site in zip(result.tasks, s.assignment))
        click.echo(f"#{rank} freq={s.frequency:.3f} mean_cost={s.mean_cost:.4f} {placing}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--project", "project_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--runs", default=DEFAULT_RUNS, show_default=True)
@click.option("--seed", type=int, default=None, help="Omit for a fresh random seed.")
@click.option("--top", default=10, show_default=True)
@click.option("-o", "--output", "output_path", type=click.Path(), help="Write a decision record.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--timestamp", default=None, help="Pin the record's created_at.")
@_domain_errors
def suggest(
    model_path: str,
    project_path: str,
    rules_path: str | None,
    runs: int,
    seed: int | None,
    top: int,
    output_path: str | None,
    fmt: str,
    timestamp: str | None,
) -> None:
    """Simulate assignments and rank them by winning frequency."""
    model = persist.load_model(model_path)
    project = persist.load_project(project_path, model)
    result = run_simulation(model, project, runs=runs, seed=seed)

    ruleset = persist.load_rules(rules_path) if rules_path else None
    risks = None
    selected = None
    if result.suggestions:
        selected = result.suggestions[0].assignment
        if ruleset is not None:
            risks = analyze_risks(model, project, selected, ruleset)

    if fmt == "json":
        click.echo(persist.canonical_json(persist.suggestions_to_dict(result)))
    else:
        _echo_suggestions(result, top)
        if risks:
            click.echo("risks for #1:")
            for f in risks:
                click.echo(f"  {f}")

    if output_path:
        record = persist.make_decision_record(
            model, project, result, ruleset, selected, risks, timestamp=timestamp
        )
        persist.save_decision(output_path, record)
        click.echo(f"wrote {output_path}")


def _parse_assignment(text: str) -> dict[str, str]:
    placed: dict[str, str] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise click.UsageError(f"assignment entry {part!r} is not task=site")
        task, site = part.split("=", 1)
        placed[task.strip()] = site.strip()
    return placed


def _echo_risks_by_site(findings, sites: tuple[str, ...]) -> None:
    # A pair finding shows up under both of its sites; anything that names
    # no site at all lands in the project-wide bucket.
    site_set = set(sites)
    buckets: dict[str, list] = {s: [] for s in sites}
    global_bucket = []
    for f in findings:
        bound = [b for b in f.binding if b in site_set]
        if not bound:
            global_bucket.append(f)
        for site in bound:
            buckets[site].append(f)
    for site in sites:
        if buckets[site]:
            click.echo(f"{site}:")
            for f in buckets[site]:
                click.echo(f"  {f}")
    if global_bucket:
        click.echo("project-wide:")
        for f in global_bucket:
            click.echo(f"  {f}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--project", "project_path", required=True, type=click.Path(exists=True))
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--assignment", "assignment_text", help="task=site,task=site,...")
@click.option("--from-decision", "decision_path", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_domain_errors
def risks(
    model_path: str,
    project_path: str,
    rules_path: str | None,
    assignment_text: str | None,
    decision_path: str | None,
    fmt: str,
) -> None:
    """Evaluate risk rules against one concrete assignment, grouped per site."""
    if (assignment_text is None) == (decision_path is None):
        raise click.UsageError("give exactly one of --assignment or --from-decision")
    model = persist.load_model(model_path)
    project = persist.load_project(project_path, model)
    record = persist.load_decision(decision_path) if decision_path else None
    ruleset = _resolve_rules(rules_path, record)
    if record is not None:
        if "selected" not in record:
            raise SchemaError("decision record has no selected assignment")
        assignment = dict(zip(record["suggestions"]["tasks"], record["selected"]))
    else:
        assignment = _parse_assignment(assignment_text)
    findings = analyze_risks(model, project, assignment, ruleset)
    if fmt == "json":
        click.echo(persist.canonical_json(persist.risks_to_list(findings)))
        return
    if not findings:
        click.echo("no findings")
        return
    _echo_risks_by_site(findings, project.sites)


def _resolve_rules(rules_path: str | None, record: dict | None):
    from .rules import parse_rules

    if rules_path:
        return persist.load_rules(rules_path)
    if record is not None and "rules" in record:
        return parse_rules(record["rules"])
    raise click.UsageError("no rule source: pass --rules or a decision record that embeds rules")


@main.command()
@click.option("--from-decision", "decision_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--project", "project_path", type=click.Path(exists=True))
@click.option("--rules", "rules_path", type=click.Path(exists=True))
@click.option("--top", default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_domain_errors
def compare(
    decision_path: str,
    model_path: str | None,
    project_path: str | None,
    rules_path: str | None,
    top: int,
    fmt: str,
) -> None:
    """Tabulate risk counts across the suggested alternatives of a decision.

    Model, project, and rules default to the copies embedded in the record;
    pass the flags to compare against edited versions.
    """
    record = persist.load_decision(decision_path)
    model = (
        persist.load_model(model_path)
        if model_path
        else persist.model_from_dict(record["model"])
    )
    project = (
        persist.load_project(project_path, model)
        if project_path
        else persist.project_from_dict(record["project"], model)
    )
    ruleset = _resolve_rules(rules_path, record)
    result = persist.suggestions_from_dict(record["suggestions"])
    rows = []
    for rank, s in enumerate(result.top(top), start=1):
        assignment = dict(zip(result.tasks, s.assignment))
        findings = analyze_risks(model, project, assignment, ruleset)
        counts = {"high": 0, "medium": 0, "low": 0}
        for f in findings:
            counts[f.severity] += 1
        rows.append(
            {
                "rank": rank,
                "assignment": list(s.assignment),
                "frequency": s.frequency,
                "mean_cost": s.mean_cost,
                "risks": {**counts, "total": len(findings)},
            }
        )
    if fmt == "json":
        click.echo(persist.canonical_json(rows))
        return
    for row in rows:
        placing = " ".join(f"{t}={site}" for t, site in zip(result.tasks, row["assignment"]))
        r = row["risks"]
        click.echo(
            f"#{row['rank']} freq={row['frequency']:.3f} "
            f"risks={r['total']} (high={r['high']} medium={r['medium']} low={r['low']}) "
            f"{placing}"
        )


@main.command()
@click.option("--from-decision", "decision_path", required=True, type=click.Path(exists=True))
@_domain_errors
def replay(decision_path: str) -> None:
    """Re-run a decision record and compare against its stored suggestions."""
    record = persist.load_decision(decision_path)
    replayed = persist.replay_decision(record)
    stored = persist.canonical_json(record["suggestions"])
    fresh = persist.canonical_json(persist.suggestions_to_dict(replayed))
    if stored == fresh:
        click.echo("match: replay reproduces the stored suggestions")
    else:
        click.echo("MISMATCH: replay differs from the stored suggestions", err=True)
        sys.exit(1)


@main.command("export-xml")
@click.option("--in", "input_path", required=True, type=click.Path(exists=True))
@click.option("-o", "--output", "output_path", required=True, type=click.Path())
@click.option("--tag", default="document", show_default=True)
@_domain_errors
def export_xml(input_path: str, output_path: str, tag: str) -> None:
    """Convert any stored JSON document to its XML mirror."""
    data = persist.load_json(input_path)
    Path(output_path).write_text(persist.to_xml(tag, data), encoding="utf-8")
    click.echo(f"wrote {output_path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option(
    "--data-dir",
    "data_dir",
    type=click.Path(),
    default=None,
    envvar="GSDALLOC_DATA_DIR",
    show_envvar=True,
)
@_domain_errors
def serve(host: str, port: int, data_dir: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .api import create_app

    app = create_app(data_dir)
    click.echo(f"backend: {_kernels.active_backend()}")
    uvicorn.run(app, host=host, port=port)


@main.command()
@_domain_errors
def backend() -> None:
    """Report which search backend is active and warm it up."""
    click.echo(_kernels.warmup())


if __name__ == "__main__":
    main()

"""Read and write models, project data, suggestion lists, decision records.

Documents are canonical JSON (sorted keys, compact separators) so equal
content always hashes equal. Unknown keys are rejected rather than ignored;
silently dropping a typo'd key would change meaning without a trace. A
decision record bundles everything that produced a suggestion list, which
makes the simulation reproducible from the record alone. Every document can
also be exported as XML mirroring the JSON structure: scalars become
attributes, nested objects become child elements, arrays become <item> rows.
"""

from __future__ import annotations

import hashlib
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from xml.etree import ElementTree as ET

from .errors import Finding, IoError, SchemaError
from .levels import Kind, Level, Scope
from .model import (
    CausalEdge,
    CausalModel,
    CausalNode,
    FactorDefinition,
    ROLE_FACTOR,
    WEIGHT_PRESETS,
)
from .optimizer import Suggestion, SuggestionList, run_simulation
from .project import ProjectCharacterization, WILDCARD, normalize_binding
from .risks import RiskFinding
from .rules import RuleSet, format_rules, parse_rules

SCHEMA_VERSION = 1


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(data) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def _check_keys(
    what: str, data: dict, required: set[str], optional: set[str], findings: list[Finding]
) -> bool:
    ok = True
    if not isinstance(data, dict):
        findings.append(Finding("BAD_TYPE", f"{what} must be an object"))
        return False
    for key in required:
        if key not in data:
            findings.append(Finding("MISSING_KEY", f"{what} misses {key!r}"))
            ok = False
    for key in data:
        if key not in required and key not in optional:
            findings.append(Finding("UNKNOWN_KEY", f"{what} has unknown key {key!r}"))
            ok = False
    return ok


def _edge_weight(raw, what: str, findings: list[Finding]) -> float:
    if isinstance(raw, str):
        if raw not in WEIGHT_PRESETS:
            findings.append(Finding("BAD_WEIGHT", f"{what}: unknown weight preset {raw!r}"))
            return 0.0
        return WEIGHT_PRESETS[raw]
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    findings.append(Finding("BAD_WEIGHT", f"{what}: weight must be a number or preset name"))
    return 0.0


# -- model ------------------------------------------------------------------

def model_to_dict(model: CausalModel) -> dict:
    nodes = []
    for n in model.nodes:
        entry: dict = {"id": n.id, "role": n.role}
        if n.polarity is not None:
            entry["polarity"] = n.polarity
        if n.role != ROLE_FACTOR:
            entry["aggregation"] = n.aggregation
            entry["noise_sigma"] = n.noise_sigma
        nodes.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "factors": [
            {
                "id": f.id,
                "display_name": f.display_name,
                "scope": f.scope.value,
                "kind": f.kind.value,
            }
            for f in model.factors
        ],
        "nodes": nodes,
        "edges": [
            {"source": e.source, "target": e.target, "sign": e.sign, "weight": e.weight}
            for e in model.edges
        ],
        "goal_weights": dict(model.goal_weights),
    }


def model_from_dict(data) -> CausalModel:
    findings: list[Finding] = []
    if not _check_keys(
        "model", data, {"schema_version", "factors", "nodes", "edges", "goal_weights"}, set(), findings
    ):
        raise SchemaError("model document rejected", findings)
    if data["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {data['schema_version']!r}")

    factors = []
    for i, raw in enumerate(data["factors"]):
        if not _check_keys(f"factors[{i}]", raw, {"id", "scope"}, {"display_name", "kind"}, findings):
            continue
        try:
            scope = Scope(raw["scope"])
            kind = Kind(raw.get("kind", "ordinal"))
        except ValueError as exc:
            findings.append(Finding("BAD_VALUE", f"factors[{i}]: {exc}"))
            continue
        factors.append(
            FactorDefinition(
                id=raw["id"],
                display_name=raw.get("display_name", raw["id"]),
                scope=scope,
                kind=kind,
            )
        )

    nodes = []
    for i, raw in enumerate(data["nodes"]):
        if not _check_keys(
            f"nodes[{i}]", raw, {"id", "role"}, {"polarity", "aggregation", "noise_sigma"}, findings
        ):
            continue
        nodes.append(
            CausalNode(
                id=raw["id"],
                role=raw["role"],
                polarity=raw.get("polarity"),
                aggregation=raw.get("aggregation"),
                noise_sigma=raw.get("noise_sigma"),
            )
        )

    edges = []
    for i, raw in enumerate(data["edges"]):
        if not _check_keys(f"edges[{i}]", raw, {"source", "target", "sign"}, {"weight"}, findings):
            continue
        weight = _edge_weight(raw.get("weight", "medium"), f"edges[{i}]", findings)
        sign = raw["sign"]
        if sign not in (1, -1):
            findings.append(Finding("BAD_SIGN", f"edges[{i}]: sign must be 1 or -1"))
            continue
        edges.append(CausalEdge(source=raw["source"], target=raw["target"], sign=sign, weight=weight))

    weights = data["goal_weights"]
    if not isinstance(weights, dict) or any(
        not isinstance(v, (int, float)) or isinstance(v, bool) for v in weights.values()
    ):
        findings.append(Finding("BAD_VALUE", "goal_weights must map goal ids to numbers"))
        weights = {}

    if findings:
        raise SchemaError("model document rejected", findings)
    return CausalModel(
        factors=tuple(factors),
        nodes=tuple(nodes),
        edges=tuple(edges),
        goal_weights={k: float(v) for k, v in weights.items()},
    )


# -- project ----------------------------------------------------------------

def _value_to_json(value):
    if isinstance(value, bool):
        return value
    return value.label


def _value_from_json(raw, what: str, findings: list[Finding]):
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, str):
        try:
            return Level.from_name(raw)
        except ValueError:
            findings.append(Finding("BAD_VALUE", f"{what}: unknown level {raw!r}"))
            return None
    findings.append(Finding("BAD_VALUE", f"{what}: expected a level name or a boolean"))
    return None


def project_to_dict(project: ProjectCharacterization) -> dict:
    values = []
    for (factor_id, binding), value in sorted(project.values.items()):
        values.append(
            {
                "factor": factor_id,
                "binding": WILDCARD if binding == (WILDCARD,) else list(binding),
                "value": _value_to_json(value),
            }
        )
    data: dict = {
        "schema_version": SCHEMA_VERSION,
        "tasks": list(project.tasks),
        "sites": list(project.sites),
        "availability": {t: list(s) for t, s in sorted(project.availability.items())},
        "values": values,
    }
    if project.goal_weight_overrides:
        data["goal_weight_overrides"] = dict(project.goal_weight_overrides)
    return data


def project_from_dict(data, model: CausalModel) -> ProjectCharacterization:
    findings: list[Finding] = []
    if not _check_keys(
        "project",
        data,
        {"tasks", "sites", "values"},
        {"schema_version", "availability", "goal_weight_overrides"},
        findings,
    ):
        raise SchemaError("project document rejected", findings)
    if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {data['schema_version']!r}")

    catalog = model.factor_map()
    values: dict = {}
    for i, raw in enumerate(data["values"]):
        if not _check_keys(f"values[{i}]", raw, {"factor", "binding", "value"}, set(), findings):
            continue
        value = _value_from_json(raw["value"], f"values[{i}]", findings)
        if value is None:
            continue
        factor_id = raw["factor"]
        fdef = catalog.get(factor_id)
        raw_binding = raw["binding"]
        if raw_binding == WILDCARD:
            binding = (WILDCARD,)
        elif isinstance(raw_binding, list) and all(isinstance(b, str) for b in raw_binding):
            binding = tuple(raw_binding)
            if fdef is not None:
                binding = normalize_binding(fdef.scope, binding)
        else:
            findings.append(Finding("BAD_BINDING", f"values[{i}]: binding must be '*' or a name list"))
            continue
        values[(factor_id, binding)] = value

    availability = {
        task: tuple(sites) for task, sites in data.get("availability", {}).items()
    }
    overrides = data.get("goal_weight_overrides", {})
    if not isinstance(overrides, dict):
        findings.append(Finding("BAD_VALUE", "goal_weight_overrides must be an object"))
        overrides = {}

    if findings:
        raise SchemaError("project document rejected", findings)
    return ProjectCharacterization(
        tasks=tuple(data["tasks"]),
        sites=tuple(data["sites"]),
        availability=availability,
        values=values,
        goal_weight_overrides={k: float(v) for k, v in overrides.items()},
    )


# -- suggestions and risks --------------------------------------------------

def suggestions_to_dict(result: SuggestionList) -> dict:
    return {
        "tasks": list(result.tasks),
        "runs": result.runs,
        "seed": result.seed,
        "suggestions": [
            {
                "assignment": list(s.assignment),
                "wins": s.wins,
                "frequency": s.frequency,
                "mean_cost": s.mean_cost,
            }
            for s in result.suggestions
        ],
    }


def suggestions_from_dict(data) -> SuggestionList:
    findings: list[Finding] = []
    if not _check_keys("suggestions", data, {"tasks", "runs", "seed", "suggestions"}, set(), findings):
        raise SchemaError("suggestion document rejected", findings)
    entries = []
    for i, raw in enumerate(data["suggestions"]):
        if not _check_keys(
            f"suggestions[{i}]", raw, {"assignment", "wins", "frequency", "mean_cost"}, set(), findings
        ):
            continue
        entries.append(
            Suggestion(
                assignment=tuple(raw["assignment"]),
                wins=int(raw["wins"]),
                frequency=float(raw["frequency"]),
                mean_cost=float(raw["mean_cost"]),
            )
        )
    if findings:
        raise SchemaError("suggestion document rejected", findings)
    return SuggestionList(
        tasks=tuple(data["tasks"]),
        runs=int(data["runs"]),
        seed=int(data["seed"]),
        suggestions=tuple(entries),
    )


def findings_to_list(findings) -> list[dict]:
    return [{"code": f.code, "message": f.message, "locus": list(f.locus)} for f in findings]


def risks_to_list(findings: tuple[RiskFinding, ...]) -> list[dict]:
    return [
        {
            "rule_id": f.rule_id,
            "problem": f.problem,
            "severity": f.severity,
            "scope": f.scope,
            "binding": list(f.binding),
            "explanation": f.explanation,
        }
        for f in findings
    ]


# -- decision records -------------------------------------------------------

def record_timestamp() -> str:
    pinned = os.environ.get("GSDALLOC_TIMESTAMP")
    if pinned:
        return pinned
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), timezone.utc).isoformat()
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def make_decision_record(
    model: CausalModel,
    project: ProjectCharacterization,
    result: SuggestionList,
    ruleset: RuleSet | None = None,
    selected: tuple[str, ...] | None = None,
    risks: tuple[RiskFinding, ...] | None = None,
    timestamp: str | None = None,
) -> dict:
    model_doc = model_to_dict(model)
    project_doc = project_to_dict(project)
    record: dict = {
        "schema_version": SCHEMA_VERSION,
        "created_at": timestamp if timestamp is not None else record_timestamp(),
        "model": model_doc,
        "model_hash": content_hash(model_doc),
        "project": project_doc,
        "project_hash": content_hash(project_doc),
        "runs": result.runs,
        "seed": result.seed,
        "suggestions": suggestions_to_dict(result),
    }
    if ruleset is not None:
        record["rules"] = format_rules(ruleset)
    if selected is not None:
        record["selected"] = list(selected)
    if risks is not None:
        record["risks"] = risks_to_list(risks)
    return record


_RECORD_REQUIRED = {
    "schema_version",
    "created_at",
    "model",
    "model_hash",
    "project",
    "project_hash",
    "runs",
    "seed",
    "suggestions",
}
_RECORD_OPTIONAL = {"rules", "selected", "risks"}


def check_decision_record(record) -> None:
    findings: list[Finding] = []
    if not _check_keys("decision record", record, _RECORD_REQUIRED, _RECORD_OPTIONAL, findings):
        raise SchemaError("decision record rejected", findings)
    for key, doc in (("model", record["model"]), ("project", record["project"])):
        if record[f"{key}_hash"] != content_hash(doc):
            findings.append(Finding("HASH_MISMATCH", f"{key}_hash does not match embedded {key}"))
    if findings:
        raise SchemaError("decision record rejected", findings)


def replay_decision(record) -> SuggestionList:
    """Re-run the simulation a record captured; equal records replay equal."""
    check_decision_record(record)
    model = model_from_dict(record["model"])
    project = project_from_dict(record["project"], model)
    return run_simulation(model, project, runs=record["runs"], seed=record["seed"])


# -- XML mirror --------------------------------------------------------------

def _scalar_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _xml_element(tag: str, data) -> ET.Element:
    element = ET.Element(tag)
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            if value is None:
                continue
            if isinstance(value, (dict, list)):
                element.append(_xml_element(key, value))
            else:
                element.set(key, _scalar_text(value))
    elif isinstance(data, list):
        for item in data:
            element.append(_xml_element("item", item))
    elif data is not None:
        element.text = _scalar_text(data)
    return element


def to_xml(root_tag: str, data) -> str:
    root = _xml_element(root_tag, data)
    tree = ET.ElementTree(root)
    ET.indent(tree)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


# -- files -------------------------------------------------------------------

def _read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_model(path: str | Path) -> CausalModel:
    return model_from_dict(_read_json(path))


def save_model(path: str | Path, model: CausalModel) -> None:
    _write_text(path, canonical_json(model_to_dict(model)) + "\n")


def load_project(path: str | Path, model: CausalModel) -> ProjectCharacterization:
    return project_from_dict(_read_json(path), model)


def save_project(path: str | Path, project: ProjectCharacterization) -> None:
    _write_text(path, canonical_json(project_to_dict(project)) + "\n")


def load_rules(path: str | Path) -> RuleSet:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return parse_rules(text)


def save_rules(path: str | Path, ruleset: RuleSet) -> None:
    _write_text(path, format_rules(ruleset))


def load_json(path: str | Path) -> dict:
    return _read_json(path)


def goal_file_from_dict(data):
    """Goal declarations, causal links, factor catalog, and node options.

    Schema: {"goals": [{"id", "polarity", "weight"?}], "links": [{"source",
    "target", "sign"?, "weight"?}], "factors": [...], "nodes": {id: options}}.
    """
    from .skeleton import CausalLink, GoalDeclaration

    findings: list[Finding] = []
    _check_keys("goal file", data, {"goals"}, {"links", "factors", "nodes"}, findings)
    if findings:
        raise SchemaError("goal file rejected", findings)
    goals = []
    for i, raw in enumerate(data["goals"]):
        if not _check_keys(f"goals[{i}]", raw, {"id", "polarity"}, {"weight"}, findings):
            continue
        goals.append(GoalDeclaration(raw["id"], raw["polarity"], float(raw.get("weight", 1.0))))
    links = []
    for i, raw in enumerate(data.get("links", [])):
        if not _check_keys(f"links[{i}]", raw, {"source", "target"}, {"sign", "weight"}, findings):
            continue
        links.append(
            CausalLink(
                raw["source"],
                raw["target"],
                int(raw.get("sign", 1)),
                _edge_weight(raw.get("weight", "medium"), f"links[{i}]", findings),
            )
        )
    factors = []
    for i, raw in enumerate(data.get("factors", [])):
        if not _check_keys(f"factors[{i}]", raw, {"id", "scope"}, {"display_name", "kind"}, findings):
            continue
        try:
            factors.append(
                FactorDefinition(
                    raw["id"],
                    raw.get("display_name", raw["id"]),
                    Scope(raw["scope"]),
                    Kind(raw.get("kind", "ordinal")),
                )
            )
        except ValueError as exc:
            findings.append(Finding("BAD_VALUE", f"factors[{i}]: {exc}"))
    node_options = data.get("nodes", {})
    if not isinstance(node_options, dict):
        findings.append(Finding("BAD_VALUE", "nodes must map node ids to option objects"))
        node_options = {}
    if findings:
        raise SchemaError("goal file rejected", findings)
    return goals, links, factors, node_options


def load_goal_file(path: str | Path):
    return goal_file_from_dict(_read_json(path))


def load_decision(path: str | Path) -> dict:
    record = _read_json(path)
    check_decision_record(record)
    return record


def save_decision(path: str | Path, record: dict) -> None:
    check_decision_record(record)
    _write_text(path, canonical_json(record) + "\n")

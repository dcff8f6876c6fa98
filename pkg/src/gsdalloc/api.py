"""HTTP service over the engine.

Documents (models, projects, rule sets) are stored under a stable id, the
hash of the content they were created with. Edits go through PATCH with the
hash the client last saw; a stale hash gets 409 so concurrent editors cannot
silently overwrite each other. Suggestion runs are cached by the exact inputs
that produced them, so repeating a request is free and returns the same id.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware

from . import persist
from ._kernels import active_backend
from .costs import build_cost_tables
from .errors import GsdallocError, RuleParseError, SchemaError
from .levels import LEVEL_IMAGES
from .model import validate_model
from .optimizer import DEFAULT_RUNS, run_simulation
from .project import validate_characterization
from .risks import analyze_risks
from .rules import format_rule, format_rules, parse_rules
from .skeleton import derive_causal_skeleton


class DocumentStore:
    """In-memory store keyed by creation hash, optionally mirrored to disk."""

    KINDS = ("models", "projects", "rules", "decisions")

    def __init__(self, data_dir: str | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.docs: dict[str, dict[str, object]] = {k: {} for k in self.KINDS}
        if self.data_dir is not None:
            self._load()

    def _load(self) -> None:
        for kind in self.KINDS:
            folder = self.data_dir / kind
            if not folder.is_dir():
                continue
            for path in sorted(folder.iterdir()):
                doc_id = path.stem
                if kind == "rules":
                    self.docs[kind][doc_id] = path.read_text(encoding="utf-8")
                else:
                    self.docs[kind][doc_id] = persist.load_json(path)

    def _flush(self, kind: str, doc_id: str) -> None:
        if self.data_dir is None:
            return
        folder = self.data_dir / kind
        folder.mkdir(parents=True, exist_ok=True)
        doc = self.docs[kind][doc_id]
        if kind == "rules":
            (folder / f"{doc_id}.rules").write_text(doc, encoding="utf-8")
        else:
            (folder / f"{doc_id}.json").write_text(
                persist.canonical_json(doc) + "\n", encoding="utf-8"
            )

    def create(self, kind: str, document) -> str:
        doc_id = self.hash_of(kind, document)
        self.docs[kind][doc_id] = document
        self._flush(kind, doc_id)
        return doc_id

    def get(self, kind: str, doc_id: str):
        try:
            return self.docs[kind][doc_id]
        except KeyError:
            raise HTTPException(404, f"no such {kind[:-1]}: {doc_id}") from None

    def replace(self, kind: str, doc_id: str, base_hash: str, document) -> str:
        current = self.get(kind, doc_id)
        current_hash = self.hash_of(kind, current)
        if base_hash != current_hash:
            raise HTTPException(
                409,
                f"stale base_hash: the stored {kind[:-1]} is at {current_hash}",
            )
        self.docs[kind][doc_id] = document
        self._flush(kind, doc_id)
        return self.hash_of(kind, document)

    @staticmethod
    def hash_of(kind: str, document) -> str:
        if kind == "rules":
            return hashlib.sha256(document.encode("utf-8")).hexdigest()
        return persist.content_hash(document)


def _require(body: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in body]
    if missing:
        raise SchemaError(f"request misses {missing}")


def create_app(data_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gsdalloc", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = DocumentStore(data_dir)
    suggestion_cache: dict[str, dict] = {}

    # Domain rejections all surface as 400 and the body is the findings list
    # itself, so clients render validation and engine errors the same way.
    @app.exception_handler(GsdallocError)
    async def _domain_error(request, exc: GsdallocError):
        from fastapi.responses import JSONResponse

        if isinstance(exc, SchemaError):
            body = persist.findings_to_list(exc.findings)
        else:
            item = {"code": exc.code, "message": str(exc), "locus": []}
            if isinstance(exc, RuleParseError):
                item["line"] = exc.line
                item["column"] = exc.column
            body = [item]
        return JSONResponse(status_code=400, content=body)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "backend": active_backend()}

    # -- documents ----------------------------------------------------------

    def _document_routes(kind: str, parse, render, summarize=None):
        prefix = f"/api/{kind}"

        @app.get(prefix)
        def list_docs() -> dict:
            return {
                "items": [
                    {"id": doc_id, "hash": store.hash_of(kind, doc)}
                    for doc_id, doc in sorted(store.docs[kind].items())
                ]
            }

        @app.post(prefix, status_code=201)
        def create_doc(body: dict) -> dict:
            _require(body, "document")
            parsed = parse(body["document"])
            document = render(parsed)
            doc_id = store.create(kind, document)
            out = {"id": doc_id, "hash": store.hash_of(kind, document)}
            if summarize is not None:
                out.update(summarize(parsed))
            return out

        @app.get(prefix + "/{doc_id}")
        def get_doc(doc_id: str) -> dict:
            doc = store.get(kind, doc_id)
            return {"id": doc_id, "hash": store.hash_of(kind, doc), "document": doc}

        @app.patch(prefix + "/{doc_id}")
        def patch_doc(doc_id: str, body: dict) -> dict:
            _require(body, "base_hash", "document")
            parsed = parse(body["document"])
            document = render(parsed)
            new_hash = store.replace(kind, doc_id, body["base_hash"], document)
            out = {"id": doc_id, "hash": new_hash}
            if summarize is not None:
                out.update(summarize(parsed))
            return out

    _document_routes(
        "models",
        parse=persist.model_from_dict,
        render=persist.model_to_dict,
    )
    # Projects parse against a model only when used; structural checks happen
    # at suggest/validate time. Stored as given, unknown keys still rejected.
    _document_routes(
        "projects",
        parse=lambda doc: doc,
        render=lambda doc: doc,
    )
    _document_routes(
        "rules",
        parse=parse_rules,
        render=format_rules,
        summarize=lambda ruleset: {
            "count": len(ruleset.rules),
            "rules": [format_rule(r) for r in ruleset.rules],
        },
    )

    @app.post("/api/models/derive", status_code=201)
    def derive_model(body: dict) -> dict:
        """Build a model skeleton from rule text plus a goal declaration."""
        _require(body, "rules", "goals")
        ruleset = parse_rules(body["rules"])
        goals, links, factors, node_options = persist.goal_file_from_dict(body["goals"])
        model = derive_causal_skeleton(ruleset, goals, links, factors or None, node_options)
        document = persist.model_to_dict(model)
        doc_id = store.create("models", document)
        return {"id": doc_id, "hash": store.hash_of("models", document), "document": document}

    def _load_pair(model_id: str, project_id: str):
        model = persist.model_from_dict(store.get("models", model_id))
        project = persist.project_from_dict(store.get("projects", project_id), model)
        return model, project

    @app.post("/api/validate")
    def validate(body: dict) -> dict:
        _require(body, "model_id")
        model = persist.model_from_dict(store.get("models", body["model_id"]))
        findings = validate_model(model)
        if not findings and "project_id" in body:
            project = persist.project_from_dict(
                store.get("projects", body["project_id"]), model
            )
            findings = validate_characterization(model, project)
        return {"ok": not findings, "findings": persist.findings_to_list(findings)}

    # -- engine -------------------------------------------------------------

    def _cache_key(model_hash: str, project_hash: str, runs: int, seed) -> str:
        return hashlib.sha256(f"{model_hash}|{project_hash}|{runs}|{seed}".encode()).hexdigest()

    def _suggestion_response(entry: dict, top: int | None) -> dict:
        payload = entry["payload"]
        if top is None:
            return payload
        result = payload["result"]
        return {**payload, "result": {**result, "suggestions": result["suggestions"][:top]}}

    @app.post("/api/suggestions")
    def suggest(body: dict) -> dict:
        _require(body, "model_id", "project_id")
        runs = int(body.get("runs", DEFAULT_RUNS))
        seed = body.get("seed")
        top = int(body["top"]) if body.get("top") is not None else None
        model_hash = store.hash_of("models", store.get("models", body["model_id"]))
        project_hash = store.hash_of("projects", store.get("projects", body["project_id"]))
        if seed is not None:
            key = _cache_key(model_hash, project_hash, runs, seed)
            if key in suggestion_cache:
                return _suggestion_response(suggestion_cache[key], top)
        model, project = _load_pair(body["model_id"], body["project_id"])
        result = run_simulation(model, project, runs=runs, seed=seed)
        key = _cache_key(model_hash, project_hash, runs, result.seed)
        payload = {
            "suggestion_id": key,
            "model_hash": model_hash,
            "project_hash": project_hash,
            "result": persist.suggestions_to_dict(result),
        }
        # The full result plus its parsed inputs stay server-side so a later
        # decision can be cut from the exact run the client saw.
        suggestion_cache[key] = {
            "payload": payload,
            "model": model,
            "project": project,
            "result": result,
        }
        return _suggestion_response(suggestion_cache[key], top)

    @app.post("/api/risks")
    def risks(body: dict) -> dict:
        _require(body, "model_id", "project_id", "rules_id", "assignment")
        model, project = _load_pair(body["model_id"], body["project_id"])
        ruleset = parse_rules(store.get("rules", body["rules_id"]))
        findings = analyze_risks(model, project, body["assignment"], ruleset)
        return {"findings": persist.risks_to_list(findings)}

    def _assignment_tuple(project, assignment) -> tuple[str, ...]:
        if isinstance(assignment, dict):
            try:
                sites = tuple(assignment[t] for t in project.tasks)
            except KeyError as exc:
                raise SchemaError(f"assignment misses task {exc.args[0]!r}") from None
        else:
            sites = tuple(assignment)
        if len(sites) != len(project.tasks):
            raise SchemaError("assignment length does not match tasks")
        unknown = [s for s in sites if s not in project.sites]
        if unknown:
            raise SchemaError(f"assignment names an unknown site: {unknown[0]!r}")
        return sites

    @app.post("/api/whatif")
    def whatif(body: dict) -> dict:
        """Expected cost breakdown of one concrete assignment."""
        _require(body, "model_id", "project_id", "assignment")
        model, project = _load_pair(body["model_id"], body["project_id"])
        sites = _assignment_tuple(project, body["assignment"])
        site_idx = tuple(project.site_index(s) for s in sites)

        tables = build_cost_tables(model, project)
        exec_mean = tables.exec_mean()
        comm_mean = tables.comm_mean()
        exec_terms = [
            {
                "task": task,
                "site": sites[t],
                "mean_cost": float(exec_mean[t, site_idx[t]]),
                "distribution": tables.exec_dist[t, site_idx[t]].tolist(),
            }
            for t, task in enumerate(project.tasks)
        ]
        comm_terms = [
            {
                "tasks": [project.tasks[i], project.tasks[j]],
                "sites": [sites[i], sites[j]],
                "mean_cost": float(comm_mean[p, site_idx[i], site_idx[j]]),
                "distribution": tables.comm_dist[p, site_idx[i], site_idx[j]].tolist(),
            }
            for p, (i, j) in enumerate(tables.coupled_pairs)
        ]
        total = tables.expected_assignment_cost(site_idx)
        return {
            "assignment": list(sites),
            "total_mean_cost": total,
            "execution": exec_terms,
            "communication": comm_terms,
            "level_images": LEVEL_IMAGES.tolist(),
        }

    # -- decisions ----------------------------------------------------------

    @app.post("/api/decisions", status_code=201)
    def create_decision(body: dict) -> dict:
        """Freeze a suggestion run, or re-run by ids, into a decision record."""
        if "suggestion_id" in body:
            entry = suggestion_cache.get(body["suggestion_id"])
            if entry is None:
                raise HTTPException(404, f"no such suggestion: {body['suggestion_id']}")
            model, project, result = entry["model"], entry["project"], entry["result"]
        else:
            _require(body, "model_id", "project_id")
            model, project = _load_pair(body["model_id"], body["project_id"])
            runs = int(body.get("runs", DEFAULT_RUNS))
            result = run_simulation(model, project, runs=runs, seed=body.get("seed"))
        ruleset = None
        if "rules_id" in body:
            ruleset = parse_rules(store.get("rules", body["rules_id"]))
        raw_selected = body.get("selected_assignment", body.get("selected"))
        selected = None
        risks_found = None
        if raw_selected is not None:
            selected = _assignment_tuple(project, raw_selected)
        elif result.suggestions:
            selected = result.suggestions[0].assignment
        if selected is not None and ruleset is not None:
            risks_found = analyze_risks(model, project, selected, ruleset)
        record = persist.make_decision_record(
            model, project, result, ruleset, selected, risks_found,
            timestamp=body.get("timestamp"),
        )
        doc_id = store.create("decisions", record)
        return {"id": doc_id, "record": record}

    @app.get("/api/decisions")
    def list_decisions() -> dict:
        return {
            "items": [
                {"id": doc_id, "created_at": doc["created_at"]}
                for doc_id, doc in sorted(store.docs["decisions"].items())
            ]
        }

    @app.get("/api/decisions/{doc_id}")
    def get_decision(doc_id: str, format: str = Query("json", pattern="^(json|xml)$")):
        record = store.get("decisions", doc_id)
        if format == "xml":
            from fastapi.responses import Response

            return Response(
                content=persist.to_xml("decision_record", record),
                media_type="application/xml",
            )
        return {"id": doc_id, "record": record}

    @app.post("/api/decisions/{doc_id}/replay")
    def replay(doc_id: str) -> dict:
        record = store.get("decisions", doc_id)
        replayed = persist.replay_decision(record)
        fresh = persist.suggestions_to_dict(replayed)
        match = persist.canonical_json(fresh) == persist.canonical_json(record["suggestions"])
        return {"match": match, "result": fresh}

    return app

"""Causal model of how project/site characteristics drive project goals.

The model is a DAG: factor nodes (roots) feed intermediate problem nodes which
feed goal nodes, over signed, weighted edges. Each non-factor node carries an
aggregation function and a noise level used when the model is compiled to a
discrete belief network.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field

from .errors import Finding
from .levels import Kind, Scope

# Named edge-weight presets; arbitrary reals in (0, 1] are also accepted.
WEIGHT_LOW = 0.33
WEIGHT_MEDIUM = 0.66
WEIGHT_HIGH = 1.0

WEIGHT_PRESETS = {"low": WEIGHT_LOW, "medium": WEIGHT_MEDIUM, "high": WEIGHT_HIGH}

ROLE_FACTOR = "factor"
ROLE_INTERMEDIATE = "intermediate"
ROLE_GOAL = "goal"

POLARITY_BENEFIT = "benefit"
POLARITY_COST = "cost"

AGG_WEIGHTED_MEAN = "weighted_mean"
AGG_MINIMUM = "minimum"
AGG_MAXIMUM = "maximum"

AGGREGATIONS = (AGG_WEIGHTED_MEAN, AGG_MINIMUM, AGG_MAXIMUM)

DEFAULT_NOISE_SIGMA = 0.15


@dataclass(frozen=True)
class FactorDefinition:
    """A named characteristic of the project, a task, a site, or a pair thereof."""

    id: str
    display_name: str
    scope: Scope
    kind: Kind = Kind.ORDINAL


@dataclass(frozen=True)
class CausalNode:
    id: str
    role: str
    polarity: str | None = None  # goal nodes only
    aggregation: str | None = None  # non-factor nodes only
    noise_sigma: float | None = None  # non-factor nodes only


@dataclass(frozen=True)
class CausalEdge:
    source: str
    target: str
    sign: int  # +1 or -1
    weight: float


@dataclass(frozen=True)
class CausalModel:
    factors: tuple[FactorDefinition, ...]
    nodes: tuple[CausalNode, ...]
    edges: tuple[CausalEdge, ...]
    goal_weights: dict[str, float] = field(default_factory=dict)

    def factor_map(self) -> dict[str, FactorDefinition]:
        return {f.id: f for f in self.factors}

    def node_map(self) -> dict[str, CausalNode]:
        return {n.id: n for n in self.nodes}

    def goal_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.role == ROLE_GOAL)

    def factor_node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.role == ROLE_FACTOR)

    def parents_of(self, node_id: str) -> tuple[CausalEdge, ...]:
        return tuple(e for e in self.edges if e.target == node_id)

    def children_of(self, node_id: str) -> tuple[CausalEdge, ...]:
        return tuple(e for e in self.edges if e.source == node_id)

    def topological_order(self) -> tuple[str, ...]:
        """Node ids sorted parents-first; raises on cycles."""
        graph: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            graph.setdefault(e.target, set()).add(e.source)
        ts = graphlib.TopologicalSorter(graph)
        return tuple(ts.static_order())


def validate_model(model: CausalModel) -> list[Finding]:
    """Check every structural invariant; an empty list means the model is sound.

    Findings are data, not failures: callers that need a hard guarantee wrap
    this in a ValidationError themselves.
    """
    findings: list[Finding] = []
    nodes = {}
    for n in model.nodes:
        if n.id in nodes:
            findings.append(Finding("DUPLICATE_NODE", f"node id {n.id!r} repeats", (n.id,)))
        nodes[n.id] = n

    factor_ids = set()
    for f in model.factors:
        if f.id in factor_ids:
            findings.append(Finding("DUPLICATE_FACTOR", f"factor id {f.id!r} repeats", (f.id,)))
        factor_ids.add(f.id)

    for n in model.nodes:
        if n.role not in (ROLE_FACTOR, ROLE_INTERMEDIATE, ROLE_GOAL):
            findings.append(Finding("BAD_ROLE", f"node {n.id!r} has role {n.role!r}", (n.id,)))
            continue
        if n.role == ROLE_FACTOR:
            if n.id not in factor_ids:
                findings.append(
                    Finding("UNKNOWN_FACTOR", f"factor node {n.id!r} has no catalog entry", (n.id,))
                )
        else:
            if n.aggregation not in AGGREGATIONS:
                findings.append(
                    Finding(
                        "BAD_AGGREGATION",
                        f"node {n.id!r} aggregation {n.aggregation!r} not one of {AGGREGATIONS}",
                        (n.id,),
                    )
                )
            if n.noise_sigma is None or n.noise_sigma < 0:
                findings.append(
                    Finding("BAD_SIGMA", f"node {n.id!r} needs noise_sigma >= 0", (n.id,))
                )
        if n.role == ROLE_GOAL and n.polarity not in (POLARITY_BENEFIT, POLARITY_COST):
            findings.append(
                Finding("BAD_POLARITY", f"goal {n.id!r} polarity {n.polarity!r}", (n.id,))
            )

    seen_edges = set()
    for e in model.edges:
        locus = (e.source, e.target)
        if e.source not in nodes or e.target not in nodes:
            findings.append(Finding("UNKNOWN_NODE", f"edge {e.source}->{e.target} references a missing node", locus))
            continue
        if e.source == e.target:
            findings.append(Finding("SELF_EDGE", f"self edge on {e.source!r}", locus))
        if locus in seen_edges:
            findings.append(Finding("DUPLICATE_EDGE", f"edge {e.source}->{e.target} repeats", locus))
        seen_edges.add(locus)
        if e.sign not in (1, -1):
            findings.append(Finding("BAD_SIGN", f"edge {e.source}->{e.target} sign must be +1/-1", locus))
        if not (0.0 < e.weight <= 1.0):
            findings.append(
                Finding("BAD_EDGE_WEIGHT", f"edge {e.source}->{e.target} weight {e.weight} outside (0,1]", locus)
            )
        src, tgt = nodes[e.source], nodes[e.target]
        if src.role == ROLE_GOAL:
            findings.append(Finding("GOAL_OUTGOING", f"goal {e.source!r} has an outgoing edge", locus))
        if tgt.role == ROLE_FACTOR:
            findings.append(Finding("FACTOR_INCOMING", f"factor {e.target!r} has an incoming edge", locus))

    try:
        model.topological_order()
    except graphlib.CycleError as exc:
        cycle = tuple(str(x) for x in exc.args[1]) if len(exc.args) > 1 else ()
        findings.append(Finding("CYCLE", "edge set contains a cycle", cycle))
        return findings  # reachability below assumes a DAG

    incoming: dict[str, int] = {n.id: 0 for n in model.nodes}
    for e in model.edges:
        if e.target in incoming:
            incoming[e.target] += 1
    for n in model.nodes:
        if n.role != ROLE_FACTOR and incoming.get(n.id, 0) == 0:
            findings.append(Finding("NO_INCOMING", f"node {n.id!r} has no incoming edge", (n.id,)))

    factor_nodes = {n.id for n in model.nodes if n.role == ROLE_FACTOR}
    if not factor_nodes:
        findings.append(Finding("NO_FACTORS", "model contains no factor nodes"))
    else:
        reachable = set(factor_nodes)
        order = model.topological_order()
        parents: dict[str, list[str]] = {n.id: [] for n in model.nodes}
        for e in model.edges:
            if e.target in parents:
                parents[e.target].append(e.source)
        for nid in order:
            # edges naming unknown nodes were already reported; skip them here
            if any(p in reachable for p in parents.get(nid, ())):
                reachable.add(nid)
        for n in model.nodes:
            if n.role == ROLE_GOAL and n.id not in reachable:
                findings.append(
                    Finding("UNREACHABLE_GOAL", f"goal {n.id!r} is not reachable from any factor", (n.id,))
                )

    goal_ids = {n.id for n in model.nodes if n.role == ROLE_GOAL}
    if set(model.goal_weights) != goal_ids:
        findings.append(
            Finding(
                "WEIGHT_KEYS_MISMATCH",
                f"goal_weights keys {sorted(model.goal_weights)} != goal nodes {sorted(goal_ids)}",
            )
        )
    if any(w < 0 for w in model.goal_weights.values()):
        findings.append(Finding("NEGATIVE_WEIGHT", "goal weights must be >= 0"))
    if model.goal_weights and abs(sum(model.goal_weights.values()) - 1.0) > 1e-9:
        findings.append(
            Finding("WEIGHTS_NOT_NORMALIZED", f"goal weights sum to {sum(model.goal_weights.values())}, expected 1")
        )

    return findings

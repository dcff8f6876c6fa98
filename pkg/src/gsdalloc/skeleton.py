"""Derive a causal model skeleton from rules, goal declarations, and links.

Every factor a rule consults becomes a root node wired into the rule's
problem node. Edge signs come from negation parity in the condition: a factor
consulted only under an odd number of negations pushes the problem down, so
the edge is negative. Links then chain problems (and plain factors) through
intermediates into the declared goals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SkeletonError
from .levels import Kind, Scope
from .model import (
    AGG_WEIGHTED_MEAN,
    DEFAULT_NOISE_SIGMA,
    POLARITY_BENEFIT,
    POLARITY_COST,
    ROLE_FACTOR,
    ROLE_GOAL,
    ROLE_INTERMEDIATE,
    WEIGHT_MEDIUM,
    CausalEdge,
    CausalModel,
    CausalNode,
    FactorDefinition,
)
from .rules import RuleSet, condition_factors, factor_signs


@dataclass(frozen=True)
class GoalDeclaration:
    id: str
    polarity: str  # benefit or cost
    weight: float = 1.0


@dataclass(frozen=True)
class CausalLink:
    source: str
    target: str
    sign: int = 1
    weight: float = WEIGHT_MEDIUM


def _default_factor(factor_id: str) -> FactorDefinition:
    # Unknown factors get the widest-reach default: a site-pair ordinal.
    return FactorDefinition(
        id=factor_id,
        display_name=factor_id.replace("_", " "),
        scope=Scope.SITE_PAIR,
        kind=Kind.ORDINAL,
    )


def derive_causal_skeleton(
    rules: RuleSet,
    goals: list[GoalDeclaration] | tuple[GoalDeclaration, ...],
    links: list[CausalLink] | tuple[CausalLink, ...],
    factors: list[FactorDefinition] | tuple[FactorDefinition, ...] | None = None,
    node_options: dict[str, dict] | None = None,
) -> CausalModel:
    catalog: dict[str, FactorDefinition] = {f.id: f for f in (factors or ())}
    node_options = node_options or {}
    goal_ids = [g.id for g in goals]
    if len(set(goal_ids)) != len(goal_ids):
        raise SkeletonError("duplicate goal declaration", code="DUPLICATE_GOAL")
    for g in goals:
        if g.polarity not in (POLARITY_BENEFIT, POLARITY_COST):
            raise SkeletonError(f"goal {g.id!r} polarity {g.polarity!r}", code="BAD_POLARITY")
        if g.weight < 0:
            raise SkeletonError(f"goal {g.id!r} has negative weight", code="BAD_WEIGHT")

    problems: list[str] = []
    for rule in rules.rules:
        if rule.problem not in problems:
            problems.append(rule.problem)

    rule_factors = set(catalog)
    for rule in rules.rules:
        rule_factors.update(condition_factors(rule.condition))
    for link in links:
        if link.target in rule_factors:
            raise SkeletonError(
                f"link targets factor {link.target!r}; factors are roots", code="FACTOR_TARGET"
            )
    link_targets = [l.target for l in links]

    factor_order: list[str] = []
    for rule in rules.rules:
        for fid in condition_factors(rule.condition):
            if fid not in factor_order:
                factor_order.append(fid)
    for fid in catalog:
        if fid not in factor_order:
            factor_order.append(fid)
    derived = set(problems) | set(link_targets) | set(goal_ids)
    for link in links:
        if link.source not in derived and link.source not in factor_order:
            factor_order.append(link.source)

    clash = set(factor_order) & derived
    if clash:
        raise SkeletonError(
            f"{sorted(clash)} appear both as factors and as derived nodes", code="ROLE_CLASH"
        )

    intermediates: list[str] = []
    for nid in problems + link_targets:
        if nid not in goal_ids and nid not in intermediates:
            intermediates.append(nid)

    # Rule edges: one per (factor, problem), sign from negation parity.
    edge_signs: dict[tuple[str, str], int] = {}
    for rule in rules.rules:
        for fid, parities in factor_signs(rule.condition).items():
            if len(parities) > 1:
                raise SkeletonError(
                    f"factor {fid!r} appears with mixed negation parity in rule {rule.id!r}",
                    code="SIGN_CONFLICT",
                )
            sign = next(iter(parities))
            key = (fid, rule.problem)
            if key in edge_signs and edge_signs[key] != sign:
                raise SkeletonError(
                    f"rules disagree on the sign of {fid!r} -> {rule.problem!r}",
                    code="SIGN_CONFLICT",
                )
            edge_signs[key] = sign

    edges: list[CausalEdge] = [
        CausalEdge(src, tgt, sign, WEIGHT_MEDIUM) for (src, tgt), sign in edge_signs.items()
    ]

    link_signs: dict[tuple[str, str], tuple[int, float]] = {}
    for link in links:
        if link.sign not in (1, -1):
            raise SkeletonError(f"link {link.source}->{link.target} sign must be +1/-1", code="BAD_SIGN")
        if link.target in factor_order:
            raise SkeletonError(
                f"link targets factor {link.target!r}; factors are roots", code="FACTOR_TARGET"
            )
        if link.source in goal_ids:
            raise SkeletonError(f"link source {link.source!r} is a goal", code="GOAL_SOURCE")
        key = (link.source, link.target)
        if key in link_signs:
            if link_signs[key] != (link.sign, link.weight):
                raise SkeletonError(
                    f"links disagree on {link.source!r} -> {link.target!r}", code="SIGN_CONFLICT"
                )
            continue
        link_signs[key] = (link.sign, link.weight)
        if key in edge_signs:
            if edge_signs[key] != link.sign:
                raise SkeletonError(
                    f"rule and link disagree on the sign of {link.source!r} -> {link.target!r}",
                    code="SIGN_CONFLICT",
                )
            continue
        edges.append(CausalEdge(link.source, link.target, link.sign, link.weight))

    # Every problem must influence at least one declared goal.
    children: dict[str, set[str]] = {}
    for e in edges:
        children.setdefault(e.source, set()).add(e.target)

    def reaches_goal(start: str, seen: set[str]) -> bool:
        if start in goal_ids:
            return True
        if start in seen:
            return False
        seen.add(start)
        return any(reaches_goal(c, seen) for c in children.get(start, ()))

    for problem in problems:
        if not reaches_goal(problem, set()):
            raise SkeletonError(
                f"problem {problem!r} has no path to a declared goal", code="UNLINKED_PROBLEM"
            )

    def make_derived(nid: str, role: str, polarity: str | None) -> CausalNode:
        opts = node_options.get(nid, {})
        return CausalNode(
            id=nid,
            role=role,
            polarity=polarity,
            aggregation=opts.get("aggregation", AGG_WEIGHTED_MEAN),
            noise_sigma=opts.get("noise_sigma", DEFAULT_NOISE_SIGMA),
        )

    nodes: list[CausalNode] = [CausalNode(fid, ROLE_FACTOR) for fid in factor_order]
    nodes.extend(make_derived(nid, ROLE_INTERMEDIATE, None) for nid in intermediates)
    polarity_of = {g.id: g.polarity for g in goals}
    nodes.extend(make_derived(gid, ROLE_GOAL, polarity_of[gid]) for gid in goal_ids)

    total = sum(g.weight for g in goals)
    if total <= 0:
        raise SkeletonError("goal weights sum to zero", code="BAD_WEIGHT")
    goal_weights = {g.id: g.weight / total for g in goals}

    factor_defs = tuple(catalog.get(fid, _default_factor(fid)) for fid in factor_order)
    return CausalModel(
        factors=factor_defs,
        nodes=tuple(nodes),
        edges=tuple(edges),
        goal_weights=goal_weights,
    )

"""Evaluate risk rules against a concrete assignment.

A rule's scope is the join of its factors' scopes: a rule touching only task
factors is checked once per task, one touching any pair factor is checked per
site interface, and so on. Site-pair rules are gated to active interfaces,
meaning site pairs that actually carry a coupled task pair split across them;
a fully co-located assignment therefore produces no site-pair findings.

Inside a site-pair binding, factors of narrower scope quantify existentially
over the entities involved in the interface: "some site", "some split pair",
"some task placed at either end". Negation applies to that quantified truth.
"""

from __future__ import annotations

from dataclasses import dataclass

from .costs import DEFAULT_COUPLING_FACTOR, coupled_task_pairs
from .errors import UnknownFactorError
from .levels import Level, Scope, value_level
from .model import CausalModel
from .project import ProjectCharacterization
from .rules import (
    And,
    BareFactor,
    Comparison,
    Condition,
    Not,
    Or,
    Rule,
    RuleSet,
    condition_factors,
)

_SEVERITY_RANK = {"high": 0, "medium": 1, "low": 2}


@dataclass(frozen=True)
class RiskFinding:
    rule_id: str
    problem: str
    severity: str
    scope: str
    binding: tuple[str, ...]
    explanation: str

    def __str__(self) -> str:
        where = f" [{', '.join(self.binding)}]" if self.binding else ""
        return f"{self.severity}: {self.problem}{where} ({self.rule_id}: {self.explanation})"


def rule_scope(rule: Rule, model: CausalModel) -> Scope:
    catalog = model.factor_map()
    scopes = set()
    for fid in condition_factors(rule.condition):
        fdef = catalog.get(fid)
        if fdef is None:
            raise UnknownFactorError(f"rule {rule.id!r} uses unknown factor {fid!r}")
        scopes.add(fdef.scope)
    if Scope.SITE_PAIR in scopes or Scope.TASK_PAIR in scopes:
        return Scope.SITE_PAIR
    if Scope.TASK_SITE in scopes or (Scope.TASK in scopes and Scope.SITE in scopes):
        return Scope.TASK_SITE
    if Scope.TASK in scopes:
        return Scope.TASK
    if Scope.SITE in scopes:
        return Scope.SITE
    return Scope.PROJECT


def active_interfaces(
    project: ProjectCharacterization,
    assignment: dict[str, str],
    coupled: tuple[tuple[int, int], ...],
) -> tuple[tuple[str, str], ...]:
    """Site pairs (in site-catalog order) carrying at least one split coupled pair."""
    site_rank = {s: k for k, s in enumerate(project.sites)}
    seen: set[tuple[str, str]] = set()
    for i, j in coupled:
        s1 = assignment[project.tasks[i]]
        s2 = assignment[project.tasks[j]]
        if s1 == s2:
            continue
        key = tuple(sorted((s1, s2), key=site_rank.get))
        seen.add(key)
    return tuple(sorted(seen, key=lambda p: (site_rank[p[0]], site_rank[p[1]])))


def _atom_predicate(atom: Condition):
    if isinstance(atom, Comparison):
        ops = {
            ">=": lambda a, b: a >= b,
            "<=": lambda a, b: a <= b,
            ">": lambda a, b: a > b,
            "<": lambda a, b: a < b,
            "==": lambda a, b: a == b,
            "!=": lambda a, b: a != b,
        }
        return lambda value: ops[atom.op](value_level(value), atom.level)
    def bare(value):
        if isinstance(value, bool):
            return value
        return value_level(value) >= Level.HIGH
    return bare


def _value_label(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return value.label


class _BindingEvaluator:
    """Evaluates a condition inside one rule binding, tracing consulted values."""

    def __init__(
        self,
        model: CausalModel,
        project: ProjectCharacterization,
        candidates: dict[Scope, tuple[tuple[str, ...], ...]],
        existential: frozenset[Scope],
    ):
        self.catalog = model.factor_map()
        self.project = project
        self.candidates = candidates
        self.existential = existential
        self.trace: list[str] = []

    def _record(self, fid: str, binding: tuple[str, ...], value) -> None:
        where = f"({', '.join(binding)})" if binding else ""
        self.trace.append(f"{fid}{where}={_value_label(value)}")

    def _eval_atom(self, atom: Condition) -> bool:
        fid = atom.factor
        fdef = self.catalog.get(fid)
        if fdef is None:
            raise UnknownFactorError(f"condition uses unknown factor {fid!r}")
        predicate = _atom_predicate(atom)
        bindings = self.candidates.get(fdef.scope)
        if bindings is None:
            raise UnknownFactorError(
                f"factor {fid!r} of scope {fdef.scope.value} does not apply here"
            )
        if fdef.scope not in self.existential:
            value = self.project.lookup(fid, fdef.scope, bindings[0])
            self._record(fid, bindings[0], value)
            return predicate(value)
        # Quantified lookup: true when any in-scope entity satisfies the atom;
        # entities without a recorded value do not witness anything.
        result = False
        for binding in bindings:
            if not self.project.has_value(fid, fdef.scope, binding):
                continue
            value = self.project.lookup(fid, fdef.scope, binding)
            self._record(fid, binding, value)
            if predicate(value):
                result = True
                break
        return result

    def evaluate(self, cond: Condition) -> bool:
        if isinstance(cond, (Comparison, BareFactor)):
            return self._eval_atom(cond)
        if isinstance(cond, Not):
            return not self.evaluate(cond.operand)
        if isinstance(cond, And):
            return all(self.evaluate(p) for p in cond.parts)
        if isinstance(cond, Or):
            return any(self.evaluate(p) for p in cond.parts)
        raise TypeError(f"not a condition: {cond!r}")


def _normalize_assignment(
    project: ProjectCharacterization, assignment
) -> dict[str, str]:
    if isinstance(assignment, dict):
        mapping = dict(assignment)
    else:
        mapping = dict(zip(project.tasks, assignment))
    for task in project.tasks:
        if task not in mapping:
            raise ValueError(f"assignment misses task {task!r}")
        if mapping[task] not in project.sites:
            raise ValueError(f"assignment places {task!r} at unknown site {mapping[task]!r}")
    return mapping


def analyze_risks(
    model: CausalModel,
    project: ProjectCharacterization,
    assignment,
    ruleset: RuleSet,
    coupling_factor: str = DEFAULT_COUPLING_FACTOR,
) -> tuple[RiskFinding, ...]:
    placed = _normalize_assignment(project, assignment)
    coupled = coupled_task_pairs(model, project, coupling_factor)
    interfaces = active_interfaces(project, placed, coupled)
    occupied = tuple(s for s in project.sites if s in set(placed.values()))
    split_pairs = tuple(
        (project.tasks[i], project.tasks[j])
        for i, j in coupled
        if placed[project.tasks[i]] != placed[project.tasks[j]]
    )

    findings: list[tuple[tuple, RiskFinding]] = []
    for rule_index, rule in enumerate(ruleset.rules):
        scope = rule_scope(rule, model)
        for binding in _rule_bindings(scope, project, placed, interfaces, occupied):
            candidates, existential = _candidate_map(scope, binding, project, placed, split_pairs)
            ev = _BindingEvaluator(model, project, candidates, existential)
            if ev.evaluate(rule.condition):
                finding = RiskFinding(
                    rule_id=rule.id,
                    problem=rule.problem,
                    severity=rule.severity,
                    scope=scope.value,
                    binding=binding,
                    explanation="; ".join(ev.trace),
                )
                findings.append(
                    ((_SEVERITY_RANK[rule.severity], rule_index, binding), finding)
                )
    findings.sort(key=lambda kv: kv[0])
    return tuple(f for _, f in findings)


def _rule_bindings(
    scope: Scope,
    project: ProjectCharacterization,
    placed: dict[str, str],
    interfaces: tuple[tuple[str, str], ...],
    occupied: tuple[str, ...],
) -> tuple[tuple[str, ...], ...]:
    if scope is Scope.PROJECT:
        return ((),)
    if scope is Scope.TASK:
        return tuple((t,) for t in project.tasks)
    if scope is Scope.SITE:
        return tuple((s,) for s in occupied)
    if scope is Scope.TASK_SITE:
        return tuple((t, placed[t]) for t in project.tasks)
    return interfaces


_NO_EXISTENTIAL: frozenset[Scope] = frozenset()
_PAIR_EXISTENTIAL = frozenset({Scope.SITE, Scope.TASK_PAIR, Scope.TASK, Scope.TASK_SITE})


def _candidate_map(
    scope: Scope,
    binding: tuple[str, ...],
    project: ProjectCharacterization,
    placed: dict[str, str],
    split_pairs: tuple[tuple[str, str], ...],
) -> tuple[dict[Scope, tuple[tuple[str, ...], ...]], frozenset[Scope]]:
    if scope is Scope.PROJECT:
        return {Scope.PROJECT: ((),)}, _NO_EXISTENTIAL
    if scope is Scope.TASK:
        return {Scope.PROJECT: ((),), Scope.TASK: (binding,)}, _NO_EXISTENTIAL
    if scope is Scope.SITE:
        return {Scope.PROJECT: ((),), Scope.SITE: (binding,)}, _NO_EXISTENTIAL
    if scope is Scope.TASK_SITE:
        task, site = binding
        return {
            Scope.PROJECT: ((),),
            Scope.TASK: ((task,),),
            Scope.SITE: ((site,),),
            Scope.TASK_SITE: (binding,),
        }, _NO_EXISTENTIAL
    s1, s2 = binding
    here = {s1, s2}
    local_tasks = tuple(t for t in project.tasks if placed[t] in here)
    local_splits = tuple(
        pair for pair in split_pairs if {placed[pair[0]], placed[pair[1]]} == here
    )
    return {
        Scope.PROJECT: ((),),
        Scope.SITE_PAIR: (binding,),
        Scope.SITE: ((s1,), (s2,)),
        Scope.TASK_PAIR: local_splits,
        Scope.TASK: tuple((t,) for t in local_tasks),
        Scope.TASK_SITE: tuple((t, placed[t]) for t in local_tasks),
    }, _PAIR_EXISTENTIAL

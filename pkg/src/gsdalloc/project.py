"""Concrete project data: tasks, sites, factor values, availability.

Factor values are keyed by (factor_id, binding) where binding identifies the
entity the value describes. Pair bindings are stored id-sorted so lookup is
order-insensitive. The wildcard binding ("*",) supplies a default for every
entity in the factor's scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import Finding, UnboundFactorError
from .levels import Kind, Level, Scope
from .model import CausalModel

WILDCARD = "*"

Binding = tuple[str, ...]
Value = Level | bool


def normalize_binding(scope: Scope, binding: Binding) -> Binding:
    if binding == (WILDCARD,):
        return binding
    if scope in (Scope.TASK_PAIR, Scope.SITE_PAIR):
        return tuple(sorted(binding))
    return tuple(binding)


def binding_arity(scope: Scope) -> int:
    return {
        Scope.PROJECT: 0,
        Scope.TASK: 1,
        Scope.SITE: 1,
        Scope.TASK_PAIR: 2,
        Scope.SITE_PAIR: 2,
        Scope.TASK_SITE: 2,
    }[scope]


@dataclass(frozen=True)
class Assignment:
    """One task->site mapping, positional over the project's task tuple."""

    sites: tuple[int, ...]

    def site_of(self, task_index: int) -> int:
        return self.sites[task_index]


@dataclass
class ProjectCharacterization:
    tasks: tuple[str, ...]
    sites: tuple[str, ...]
    availability: dict[str, tuple[str, ...]]
    values: dict[tuple[str, Binding], Value] = field(default_factory=dict)
    goal_weight_overrides: dict[str, float] = field(default_factory=dict)

    def task_index(self, task: str) -> int:
        return self.tasks.index(task)

    def site_index(self, site: str) -> int:
        return self.sites.index(site)

    def set_value(self, factor_id: str, binding: Binding, value: Value, scope: Scope) -> None:
        self.values[(factor_id, normalize_binding(scope, binding))] = value

    def lookup(self, factor_id: str, scope: Scope, binding: Binding) -> Value:
        """Exact binding first, then the wildcard default; missing -> error."""
        key = (factor_id, normalize_binding(scope, binding))
        if key in self.values:
            return self.values[key]
        wild = (factor_id, (WILDCARD,))
        if wild in self.values:
            return self.values[wild]
        raise UnboundFactorError(f"no value for factor {factor_id!r} at {binding!r}")

    def has_value(self, factor_id: str, scope: Scope, binding: Binding) -> bool:
        key = (factor_id, normalize_binding(scope, binding))
        return key in self.values or (factor_id, (WILDCARD,)) in self.values

    def available_sites(self, task: str) -> tuple[str, ...]:
        got = self.availability.get(task)
        if got is None:
            return self.sites
        return got


def demanded_bindings(scope: Scope, project: ProjectCharacterization) -> list[Binding]:
    """Every binding a factor of this scope needs a value for.

    Task-site factors are only demanded where the site is actually available
    for the task; pairs are demanded once per unordered pair.
    """
    if scope is Scope.PROJECT:
        return [()]
    if scope is Scope.TASK:
        return [(t,) for t in project.tasks]
    if scope is Scope.SITE:
        return [(s,) for s in project.sites]
    if scope is Scope.TASK_PAIR:
        return [tuple(p) for p in combinations(project.tasks, 2)]
    if scope is Scope.SITE_PAIR:
        return [tuple(p) for p in combinations(project.sites, 2)]
    return [(t, s) for t in project.tasks for s in project.available_sites(t)]


def validate_characterization(model: CausalModel, project: ProjectCharacterization) -> list[Finding]:
    findings: list[Finding] = []
    catalog = model.factor_map()

    if not project.tasks:
        findings.append(Finding("NO_TASKS", "project has no tasks"))
    if not project.sites:
        findings.append(Finding("NO_SITES", "project has no sites"))
    if len(set(project.tasks)) != len(project.tasks):
        findings.append(Finding("DUPLICATE_TASK", "task ids repeat"))
    if len(set(project.sites)) != len(project.sites):
        findings.append(Finding("DUPLICATE_SITE", "site ids repeat"))

    site_set = set(project.sites)
    task_set = set(project.tasks)
    for task, sites in project.availability.items():
        if task not in task_set:
            findings.append(Finding("UNKNOWN_TASK", f"availability names unknown task {task!r}", (task,)))
            continue
        unknown = [s for s in sites if s not in site_set]
        for s in unknown:
            findings.append(Finding("UNKNOWN_SITE", f"availability for {task!r} names unknown site {s!r}", (task, s)))
        if not tuple(s for s in sites if s in site_set):
            findings.append(Finding("TASK_UNASSIGNABLE", f"task {task!r} has no available site", (task,)))

    for (factor_id, binding), value in project.values.items():
        fdef = catalog.get(factor_id)
        if fdef is None:
            findings.append(Finding("UNKNOWN_FACTOR", f"value set for unknown factor {factor_id!r}", (factor_id,)))
            continue
        if fdef.kind is Kind.BOOLEAN and not isinstance(value, bool):
            findings.append(
                Finding("BAD_VALUE", f"{factor_id!r} is boolean, got {value!r}", (factor_id, *binding))
            )
        if fdef.kind is Kind.ORDINAL and not isinstance(value, Level):
            findings.append(
                Finding("BAD_VALUE", f"{factor_id!r} is ordinal, got {value!r}", (factor_id, *binding))
            )
        if binding == (WILDCARD,):
            continue
        arity = binding_arity(fdef.scope)
        if len(binding) != arity:
            findings.append(
                Finding(
                    "BAD_BINDING",
                    f"{factor_id!r} ({fdef.scope.value}) takes {arity} entities, got {binding!r}",
                    (factor_id, *binding),
                )
            )
            continue
        domains = {
            Scope.PROJECT: (),
            Scope.TASK: (task_set,),
            Scope.SITE: (site_set,),
            Scope.TASK_PAIR: (task_set, task_set),
            Scope.SITE_PAIR: (site_set, site_set),
            Scope.TASK_SITE: (task_set, site_set),
        }[fdef.scope]
        for entity, domain in zip(binding, domains):
            if entity not in domain:
                findings.append(
                    Finding("UNKNOWN_ENTITY", f"{factor_id!r} binding names unknown entity {entity!r}", (factor_id, entity))
                )
        if fdef.scope in (Scope.TASK_PAIR, Scope.SITE_PAIR) and len(set(binding)) != len(binding):
            findings.append(
                Finding("PAIR_SELF", f"{factor_id!r} pair binding repeats an entity", (factor_id, *binding))
            )

    for fdef in model.factors:
        for binding in demanded_bindings(fdef.scope, project):
            if not project.has_value(fdef.id, fdef.scope, binding):
                where = ", ".join(binding) if binding else "project"
                findings.append(
                    Finding("MISSING_VALUE", f"no value for {fdef.id!r} at ({where})", (fdef.id, *binding))
                )

    for goal_id, weight in project.goal_weight_overrides.items():
        if goal_id not in model.goal_ids():
            findings.append(Finding("UNKNOWN_GOAL", f"override names unknown goal {goal_id!r}", (goal_id,)))
        elif weight < 0:
            findings.append(Finding("NEGATIVE_WEIGHT", f"override for {goal_id!r} is negative", (goal_id,)))
    if project.goal_weight_overrides:
        merged = dict(model.goal_weights)
        merged.update(project.goal_weight_overrides)
        if abs(sum(merged.values()) - 1.0) > 1e-9:
            findings.append(
                Finding("WEIGHTS_NOT_NORMALIZED", f"effective goal weights sum to {sum(merged.values())}")
            )

    return findings


def effective_goal_weights(model: CausalModel, project: ProjectCharacterization) -> dict[str, float]:
    merged = dict(model.goal_weights)
    merged.update(project.goal_weight_overrides)
    return merged

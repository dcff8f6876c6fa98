"""Risk-aware task-to-site allocation advisor for distributed projects."""

from ._kernels import active_backend, warmup
from .bayes import BeliefNetwork, Posterior, compile_network, infer, infer_joint
from .costs import CostTables, build_cost_tables, coupled_task_pairs
from .errors import (
    Finding,
    GsdallocError,
    InconsistentEvidenceError,
    InfeasibleError,
    InferenceError,
    IoError,
    RuleParseError,
    SchemaError,
    SkeletonError,
    UnboundFactorError,
    UnknownFactorError,
    ValidationError,
)
from .levels import Kind, Level, Scope
from .model import (
    CausalEdge,
    CausalModel,
    CausalNode,
    FactorDefinition,
    validate_model,
)
from .optimizer import Suggestion, SuggestionList, run_simulation, simulate
from .project import Assignment, ProjectCharacterization, validate_characterization
from .risks import RiskFinding, analyze_risks, rule_scope
from .rules import Rule, RuleSet, format_rules, parse_condition, parse_rules
from .skeleton import CausalLink, GoalDeclaration, derive_causal_skeleton

__version__ = "0.1.0"

__all__ = [
    "active_backend",
    "analyze_risks",
    "Assignment",
    "BeliefNetwork",
    "build_cost_tables",
    "CausalEdge",
    "CausalLink",
    "CausalModel",
    "CausalNode",
    "compile_network",
    "CostTables",
    "coupled_task_pairs",
    "derive_causal_skeleton",
    "FactorDefinition",
    "Finding",
    "format_rules",
    "GoalDeclaration",
    "GsdallocError",
    "InconsistentEvidenceError",
    "infer",
    "infer_joint",
    "InfeasibleError",
    "InferenceError",
    "IoError",
    "Kind",
    "Level",
    "parse_condition",
    "parse_rules",
    "Posterior",
    "ProjectCharacterization",
    "RiskFinding",
    "Rule",
    "rule_scope",
    "RuleParseError",
    "RuleSet",
    "run_simulation",
    "SchemaError",
    "Scope",
    "simulate",
    "SkeletonError",
    "Suggestion",
    "SuggestionList",
    "UnboundFactorError",
    "UnknownFactorError",
    "validate_characterization",
    "validate_model",
    "ValidationError",
    "warmup",
]

"""Textual rule language linking factor conditions to problem nodes.

One rule per line:

    [id ':'] condition '->' problem ['@' severity]

Conditions combine atoms with '!', '&', '|' ('&' binds tighter) and
parentheses. An atom is either `factor >= level` (any of >= > <= < == !=)
or a bare factor name, which is shorthand for "the factor is pronounced":
truth for boolean factors, `>= high` for ordinal ones. '#' starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import RuleParseError
from .levels import Level, value_level

SEVERITIES = ("low", "medium", "high")
DEFAULT_SEVERITY = "medium"

_COMPARATORS = {
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass(frozen=True)
class Comparison:
    factor: str
    op: str
    level: Level


@dataclass(frozen=True)
class BareFactor:
    factor: str


@dataclass(frozen=True)
class Not:
    operand: "Condition"


@dataclass(frozen=True)
class And:
    parts: tuple["Condition", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Condition", ...]


Condition = Comparison | BareFactor | Not | And | Or


@dataclass(frozen=True)
class Rule:
    id: str
    condition: Condition
    problem: str
    severity: str = DEFAULT_SEVERITY
    id_explicit: bool = True


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    source: str = field(default="", compare=False)

    def by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<arrow>->)"
    r"|(?P<op>>=|<=|==|!=|>|<)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[:@&|!()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize_line(text: str, line_no: int) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleParseError(f"unexpected character {text[pos]!r}", line_no, pos + 1)
        if m.lastgroup == "ws" or m.lastgroup == "comment":
            pos = m.end()
            continue
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "punct":
            kind = tok_text
        tokens.append(_Token(kind, tok_text, line_no, m.start() + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], line_no: int, line_len: int):
        self.tokens = tokens
        self.i = 0
        self.line_no = line_no
        self.line_len = line_len

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise RuleParseError("unexpected end of rule", self.line_no, self.line_len + 1)
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            got = tok.text if tok else "end of rule"
            col = tok.col if tok else self.line_len + 1
            raise RuleParseError(f"expected {kind!r}, got {got!r}", self.line_no, col)
        return self.next()

    def parse_condition(self) -> Condition:
        parts = [self.parse_conjunction()]
        while (tok := self.peek()) is not None and tok.kind == "|":
            self.next()
            parts.append(self.parse_conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_conjunction(self) -> Condition:
        parts = [self.parse_term()]
        while (tok := self.peek()) is not None and tok.kind == "&":
            self.next()
            parts.append(self.parse_term())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_term(self) -> Condition:
        tok = self.peek()
        if tok is not None and tok.kind == "!":
            self.next()
            return Not(self.parse_term())
        return self.parse_atom()

    def parse_atom(self) -> Condition:
        tok = self.next()
        if tok.kind == "(":
            inner = self.parse_condition()
            self.expect(")")
            return inner
        if tok.kind != "ident":
            raise RuleParseError(f"expected a factor name, got {tok.text!r}", self.line_no, tok.col)
        nxt = self.peek()
        if nxt is not None and nxt.kind == "op":
            op = self.next()
            level_tok = self.next()
            if level_tok.kind != "ident":
                raise RuleParseError(f"expected a level name, got {level_tok.text!r}", self.line_no, level_tok.col)
            try:
                level = Level.from_name(level_tok.text)
            except ValueError:
                raise RuleParseError(
                    f"unknown level {level_tok.text!r}", self.line_no, level_tok.col
                ) from None
            return Comparison(tok.text, op.text, level)
        return BareFactor(tok.text)


def _parse_rule_line(text: str, line_no: int, auto_counter: int, taken: set[str]) -> tuple[Rule, int]:
    tokens = _tokenize_line(text, line_no)
    parser = _Parser(tokens, line_no, len(text))

    rule_id: str | None = None
    explicit = False
    if (
        len(tokens) >= 2
        and tokens[0].kind == "ident"
        and tokens[1].kind == ":"
    ):
        rule_id = parser.next().text
        parser.next()
        explicit = True
        if rule_id in taken:
            raise RuleParseError(f"duplicate rule id {rule_id!r}", line_no, tokens[0].col)

    condition = parser.parse_condition()
    parser.expect("arrow")
    problem_tok = parser.expect("ident")

    severity = DEFAULT_SEVERITY
    if (tok := parser.peek()) is not None and tok.kind == "@":
        parser.next()
        sev_tok = parser.expect("ident")
        if sev_tok.text not in SEVERITIES:
            raise RuleParseError(f"unknown severity {sev_tok.text!r}", line_no, sev_tok.col)
        severity = sev_tok.text

    if (tok := parser.peek()) is not None:
        raise RuleParseError(f"trailing input {tok.text!r}", line_no, tok.col)

    if rule_id is None:
        while True:
            auto_counter += 1
            rule_id = f"rule{auto_counter}"
            if rule_id not in taken:
                break

    return Rule(rule_id, condition, problem_tok.text, severity, id_explicit=explicit), auto_counter


def parse_rules(source: str) -> RuleSet:
    rules: list[Rule] = []
    taken: set[str] = set()
    auto_counter = 0
    for line_no, raw in enumerate(source.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        rule, auto_counter = _parse_rule_line(raw, line_no, auto_counter, taken)
        taken.add(rule.id)
        rules.append(rule)
    return RuleSet(tuple(rules), source=source)


def parse_condition(source: str) -> Condition:
    tokens = _tokenize_line(source, 1)
    parser = _Parser(tokens, 1, len(source))
    cond = parser.parse_condition()
    if (tok := parser.peek()) is not None:
        raise RuleParseError(f"trailing input {tok.text!r}", 1, tok.col)
    return cond


_PREC = {Or: 1, And: 2, Not: 3}


def format_condition(condition: Condition) -> str:
    def render(cond: Condition, parent_prec: int) -> str:
        if isinstance(cond, Comparison):
            return f"{cond.factor} {cond.op} {cond.level.label}"
        if isinstance(cond, BareFactor):
            return cond.factor
        if isinstance(cond, Not):
            text = "!" + render(cond.operand, _PREC[Not])
            return f"({text})" if parent_prec > _PREC[Not] else text
        parts = cond.parts
        sep = " & " if isinstance(cond, And) else " | "
        prec = _PREC[type(cond)]
        text = sep.join(render(p, prec) for p in parts)
        return f"({text})" if parent_prec > prec else text

    return render(condition, 0)


def format_rule(rule: Rule) -> str:
    head = f"{rule.id}: " if rule.id_explicit else ""
    tail = f" @{rule.severity}" if rule.severity != DEFAULT_SEVERITY else ""
    return f"{head}{format_condition(rule.condition)} -> {rule.problem}{tail}"


def format_rules(ruleset: RuleSet) -> str:
    return "\n".join(format_rule(r) for r in ruleset.rules) + ("\n" if ruleset.rules else "")


def condition_factors(condition: Condition) -> tuple[str, ...]:
    """Factor ids referenced by the condition, in first-appearance order."""
    seen: list[str] = []

    def walk(cond: Condition) -> None:
        if isinstance(cond, (Comparison, BareFactor)):
            if cond.factor not in seen:
                seen.append(cond.factor)
        elif isinstance(cond, Not):
            walk(cond.operand)
        else:
            for p in cond.parts:
                walk(p)

    walk(condition)
    return tuple(seen)


def factor_signs(condition: Condition) -> dict[str, set[int]]:
    """Per factor, the set of negation parities (+1 even, -1 odd) it appears under."""
    signs: dict[str, set[int]] = {}

    def walk(cond: Condition, parity: int) -> None:
        if isinstance(cond, (Comparison, BareFactor)):
            signs.setdefault(cond.factor, set()).add(parity)
        elif isinstance(cond, Not):
            walk(cond.operand, -parity)
        else:
            for p in cond.parts:
                walk(p, parity)

    walk(condition, 1)
    return signs


def evaluate_condition(condition: Condition, lookup) -> bool:
    """Evaluate against `lookup(factor_id) -> Level | bool`.

    Bare boolean factors read as their truth value; bare ordinal factors as
    `>= high`. Comparisons coerce booleans to the scale endpoints.
    """
    if isinstance(condition, Comparison):
        value = lookup(condition.factor)
        return _COMPARATORS[condition.op](value_level(value), condition.level)
    if isinstance(condition, BareFactor):
        value = lookup(condition.factor)
        if isinstance(value, bool):
            return value
        return value_level(value) >= Level.HIGH
    if isinstance(condition, Not):
        return not evaluate_condition(condition.operand, lookup)
    if isinstance(condition, And):
        return all(evaluate_condition(p, lookup) for p in condition.parts)
    return any(evaluate_condition(p, lookup) for p in condition.parts)

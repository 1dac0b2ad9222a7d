"""Domain-neutral decision-graph model, validation and traversal.

A graph is a set of question nodes (binary or multi-select) wired by
transition rules. Each rule matches one answer bucket of its node, may attach
risk labels, and names the next node or TERMINAL. Traversal over a complete
answer path folds the attached labels into a risk outcome set; an empty fold
yields LOW.

Graphs are content, not code: everything here runs any structurally valid
document, not just the shipped EU AI Act scheme.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import (
    IllegalAnswer,
    IncompletePath,
    InvalidPrefix,
    ParseError,
    ValidationError,
)

TERMINAL = "TERMINAL"

# Well-known id of the "none of the above" option on multi-select nodes.
NONE_OPTION_ID = "none"


class AnswerMode(str, Enum):
    BINARY = "binary"
    MULTI_SELECT = "multi_select"


class Predicate(str, Enum):
    IS_YES = "is_yes"
    IS_NO = "is_no"
    ANY_SELECTED = "any_selected"
    NONE_SELECTED = "none_selected"


# Predicate buckets that make a node total, per answer mode.
REQUIRED_PREDICATES = {
    AnswerMode.BINARY: frozenset({Predicate.IS_YES, Predicate.IS_NO}),
    AnswerMode.MULTI_SELECT: frozenset({Predicate.ANY_SELECTED, Predicate.NONE_SELECTED}),
}


class RiskCategory(str, Enum):
    OUT_OF_SCOPE = "OUT_OF_SCOPE"
    NOT_AI_SYSTEM = "NOT_AI_SYSTEM"
    UNACCEPTABLE = "UNACCEPTABLE"
    HIGH = "HIGH"
    LIMITED = "LIMITED"
    LOW = "LOW"


# Display / serialization order, most severe first.
_CATEGORY_ORDER = {c: i for i, c in enumerate(RiskCategory)}

# Categories that must be the only label in a final outcome set.
EXCLUSIVE_SINGLETONS = frozenset(
    {
        RiskCategory.OUT_OF_SCOPE,
        RiskCategory.NOT_AI_SYSTEM,
        RiskCategory.UNACCEPTABLE,
        RiskCategory.LOW,
    }
)


class TransparencyBasis(str, Enum):
    """Sub-basis of a LIMITED label, one per transparency obligation."""

    ART50_1 = "Art50_1"
    ART50_2 = "Art50_2"
    ART50_3 = "Art50_3"


_LABEL_RE = re.compile(r"^([A-Z_]+)(?:\(([A-Za-z0-9_]+)\))?$")


@dataclass(frozen=True, order=True)
class RiskLabel:
    """A risk category, plus the transparency sub-basis for LIMITED labels."""

    category: RiskCategory
    sub_basis: TransparencyBasis | None = None

    def __post_init__(self):
        if self.category is RiskCategory.LIMITED:
            if self.sub_basis is None:
                raise ValueError("LIMITED label requires a sub-basis")
        elif self.sub_basis is not None:
            raise ValueError(f"{self.category.value} label cannot carry a sub-basis")

    def __str__(self) -> str:
        if self.sub_basis is not None:
            return f"{self.category.value}({self.sub_basis.value})"
        return self.category.value

    @classmethod
    def parse(cls, text: str) -> "RiskLabel":
        m = _LABEL_RE.match(text)
        if not m:
            raise ParseError(f"malformed risk label {text!r}", field="label")
        cat_s, sub_s = m.groups()
        try:
            category = RiskCategory(cat_s)
        except ValueError:
            raise ParseError(f"unknown risk category {cat_s!r}", field="label") from None
        sub = None
        if sub_s is not None:
            try:
                sub = TransparencyBasis(sub_s)
            except ValueError:
                raise ParseError(f"unknown sub-basis {sub_s!r}", field="label") from None
        try:
            return cls(category, sub)
        except ValueError as e:
            raise ParseError(str(e), field="label") from None


LABEL_LOW = RiskLabel(RiskCategory.LOW)

# Rendered category shown to users; NOT_AI_SYSTEM keeps its distinct basis in
# the data but is reported under the out-of-scope umbrella.
USER_FACING_CATEGORY = {
    RiskCategory.OUT_OF_SCOPE: "Out of scope",
    RiskCategory.NOT_AI_SYSTEM: "Out of scope",
    RiskCategory.UNACCEPTABLE: "Unacceptable risk",
    RiskCategory.HIGH: "High risk",
    RiskCategory.LIMITED: "Limited risk",
    RiskCategory.LOW: "Low risk",
}


@dataclass(frozen=True)
class OptionItem:
    id: str
    label: str
    legal_ref: str = ""

    @property
    def is_none_sentinel(self) -> bool:
        return self.id == NONE_OPTION_ID


@dataclass(frozen=True)
class QuestionNode:
    id: str
    prompt: str
    answer_mode: AnswerMode
    options: tuple[OptionItem, ...] = ()
    legal_ref: str = ""
    phrasing_note: str | None = None

    def option_ids(self) -> frozenset[str]:
        return frozenset(o.id for o in self.options)

    def selectable_ids(self) -> frozenset[str]:
        """Option ids excluding the none-of-the-above sentinel."""
        return frozenset(o.id for o in self.options if not o.is_none_sentinel)


@dataclass(frozen=True)
class OutcomeAction:
    """Label attachment on a rule; short_circuit also ends the path."""

    kind: str  # "add_label" | "short_circuit"
    label: RiskLabel
    basis: str


@dataclass(frozen=True)
class TransitionRule:
    from_node: str
    predicate: Predicate
    actions: tuple[OutcomeAction, ...]
    next: str  # node id or TERMINAL


@dataclass(frozen=True)
class AnswerValue:
    """Either a yes/no choice or a set of selected option ids.

    Selections never contain the none sentinel; an empty set means
    "none of the above".
    """

    choice: bool | None = None
    selected: frozenset[str] | None = None

    def __post_init__(self):
        if (self.choice is None) == (self.selected is None):
            raise ValueError("answer must be exactly one of choice or selection")

    @classmethod
    def yes(cls) -> "AnswerValue":
        return cls(choice=True)

    @classmethod
    def no(cls) -> "AnswerValue":
        return cls(choice=False)

    @classmethod
    def selection(cls, ids: Iterable[str] = ()) -> "AnswerValue":
        return cls(selected=frozenset(ids))

    @property
    def is_binary(self) -> bool:
        return self.choice is not None

    def to_json(self):
        if self.is_binary:
            return "yes" if self.choice else "no"
        return sorted(self.selected)

    @classmethod
    def from_json(cls, value) -> "AnswerValue":
        if value in ("yes", "no"):
            return cls(choice=value == "yes")
        if isinstance(value, bool):
            return cls(choice=value)
        if isinstance(value, (list, tuple, set, frozenset)):
            if not all(isinstance(v, str) for v in value):
                raise ParseError("selection must be a list of option id strings", field="answer")
            return cls.selection(value)
        raise ParseError(f"malformed answer value {value!r}", field="answer")

    def __str__(self) -> str:
        if self.is_binary:
            return "yes" if self.choice else "no"
        return "{" + ",".join(sorted(self.selected)) + "}"


def coerce_answer(node: QuestionNode, answer: AnswerValue) -> AnswerValue:
    """Check an answer against its node and normalize sentinel selections.

    A selection consisting solely of the none sentinel collapses to the empty
    set; the sentinel combined with real options is illegal.

    Raises:
        IllegalAnswer: wrong mode, unknown option ids, or sentinel misuse.
    """
    if node.answer_mode is AnswerMode.BINARY:
        if not answer.is_binary:
            raise IllegalAnswer(f"{node.id} takes a yes/no answer", field="answer")
        return answer
    if answer.is_binary:
        raise IllegalAnswer(f"{node.id} takes a selection answer", field="answer")
    selected = answer.selected
    if NONE_OPTION_ID in selected:
        if len(selected) > 1:
            raise IllegalAnswer(
                f"{node.id}: 'none of the above' cannot be combined with other options",
                field="answer",
            )
        selected = frozenset()
    unknown = selected - node.selectable_ids()
    if unknown:
        raise IllegalAnswer(
            f"{node.id}: unknown option ids {sorted(unknown)}", field="answer"
        )
    return AnswerValue.selection(selected)


def predicate_matches(predicate: Predicate, answer: AnswerValue) -> bool:
    if predicate is Predicate.IS_YES:
        return answer.is_binary and answer.choice is True
    if predicate is Predicate.IS_NO:
        return answer.is_binary and answer.choice is False
    if predicate is Predicate.ANY_SELECTED:
        return not answer.is_binary and len(answer.selected) > 0
    return not answer.is_binary and len(answer.selected) == 0


@dataclass(frozen=True)
class DecisionGraph:
    """Immutable question-flow graph; validate before traversing."""

    start: str
    nodes: tuple[QuestionNode, ...]
    rules: tuple[TransitionRule, ...]
    version: str

    _node_index: dict = field(default_factory=dict, repr=False, compare=False)
    _rule_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        node_index = {}
        for node in self.nodes:
            node_index.setdefault(node.id, node)
        rule_index = {}
        for rule in self.rules:
            rule_index.setdefault((rule.from_node, rule.predicate), rule)
        object.__setattr__(self, "_node_index", node_index)
        object.__setattr__(self, "_rule_index", rule_index)

    def node(self, node_id: str) -> QuestionNode:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise InvalidPrefix(f"unknown node {node_id!r}", field="node_id") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_index

    def rule_for(self, node_id: str, answer: AnswerValue) -> TransitionRule:
        """The unique rule matching a (coerced) answer at a node."""
        node = self.node(node_id)
        for predicate in REQUIRED_PREDICATES[node.answer_mode]:
            if predicate_matches(predicate, answer):
                rule = self._rule_index.get((node_id, predicate))
                if rule is None:
                    raise InvalidPrefix(f"no rule for {node_id}/{predicate.value}")
                return rule
        raise IllegalAnswer(f"answer does not match any bucket of {node_id}")


class ViolationKind(str, Enum):
    DUPLICATE_NODE = "duplicate_node"
    DUPLICATE_OPTION = "duplicate_option"
    UNKNOWN_START = "unknown_start"
    DANGLING_EDGE = "dangling_edge"
    RULE_FOR_UNKNOWN_NODE = "rule_for_unknown_node"
    NON_TOTAL_NODE = "non_total_node"
    CONFLICTING_RULES = "conflicting_rules"
    PREDICATE_MISMATCH = "predicate_mismatch"
    OPTIONS_ON_BINARY = "options_on_binary"
    MISSING_OPTIONS = "missing_options"
    MISSING_NONE_SENTINEL = "missing_none_sentinel"
    SHORT_CIRCUIT_NOT_TERMINAL = "short_circuit_not_terminal"
    CYCLE = "cycle"
    UNREACHABLE_NODE = "unreachable_node"
    EXCLUSIVITY = "exclusivity"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject: str
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "subject": self.subject, "detail": self.detail}

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.subject}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> frozenset[ViolationKind]:
        return frozenset(v.kind for v in self.violations)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def exclusivity_violations(labels: Iterable[RiskLabel]) -> list[str]:
    """Messages for every way a label set breaks the exclusivity rules."""
    label_set = frozenset(labels)
    problems = []
    for label in sorted(label_set):
        if label.category in EXCLUSIVE_SINGLETONS and len(label_set) > 1:
            others = sorted(str(l) for l in label_set if l != label)
            problems.append(f"{label} must be a singleton, co-occurs with {others}")
    return problems


@dataclass(frozen=True)
class RationaleEntry:
    """One traversal step: the answer given and the rule it triggered."""

    node_id: str
    answer: AnswerValue
    predicate: Predicate
    next: str
    legal_ref: str
    actions: tuple[OutcomeAction, ...]

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "answer": self.answer.to_json(),
            "predicate": self.predicate.value,
            "next": self.next,
            "legal_ref": self.legal_ref,
            "actions": [
                {"kind": a.kind, "label": str(a.label), "basis": a.basis}
                for a in self.actions
            ],
        }


@dataclass(frozen=True)
class OutcomeLabel:
    label: RiskLabel
    basis: str

    def to_dict(self) -> dict:
        return {"label": str(self.label), "basis": self.basis}


LOW_BASIS = "No obligation under Art. 5, Art. 6 or Art. 50 triggered"


@dataclass(frozen=True)
class RiskOutcomeSet:
    """Final labels with their legal bases, plus the traversal rationale."""

    labels: tuple[OutcomeLabel, ...]
    rationale: tuple[RationaleEntry, ...]

    def __post_init__(self):
        problems = exclusivity_violations(self.label_set)
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def label_set(self) -> frozenset[RiskLabel]:
        return frozenset(l.label for l in self.labels)

    @property
    def categories(self) -> frozenset[RiskCategory]:
        return frozenset(l.label.category for l in self.labels)

    def to_dict(self) -> dict:
        return {
            "labels": [l.to_dict() for l in self.labels],
            "categories": sorted(
                {USER_FACING_CATEGORY[c] for c in self.categories},
            ),
            "rationale": [r.to_dict() for r in self.rationale],
        }


def _sorted_labels(labels: Iterable[OutcomeLabel]) -> tuple[OutcomeLabel, ...]:
    seen = set()
    out = []
    for ol in sorted(
        labels,
        key=lambda ol: (_CATEGORY_ORDER[ol.label.category], str(ol.label), ol.basis),
    ):
        key = (ol.label, ol.basis)
        if key not in seen:
            seen.add(key)
            out.append(ol)
    return tuple(out)


# ---------------------------------------------------------------------------
# Parsing


def _require(obj: dict, key: str, ctx: str):
    if key not in obj:
        raise ParseError(f"{ctx}: missing field {key!r}", field=key)
    return obj[key]


def parse_graph_document(doc: dict) -> DecisionGraph:
    """Build an (unvalidated) graph from a document dict.

    Raises ParseError on structural problems a schema would catch: missing
    fields, unknown enum values, wrong types. Semantic invariants are the job
    of validate_graph.
    """
    if not isinstance(doc, dict):
        raise ParseError("graph document must be an object")
    version = _require(doc, "version", "document")
    start = _require(doc, "start", "document")
    raw_nodes = _require(doc, "nodes", "document")
    raw_rules = _require(doc, "rules", "document")
    if not isinstance(raw_nodes, list) or not isinstance(raw_rules, list):
        raise ParseError("nodes and rules must be arrays")

    nodes = []
    for raw in raw_nodes:
        node_id = _require(raw, "id", "node")
        mode_s = _require(raw, "answer_mode", f"node {node_id}")
        try:
            mode = AnswerMode(mode_s)
        except ValueError:
            raise ParseError(
                f"node {node_id}: unknown answer_mode {mode_s!r}", field="answer_mode"
            ) from None
        options = []
        for raw_opt in raw.get("options", []):
            options.append(
                OptionItem(
                    id=_require(raw_opt, "id", f"option of {node_id}"),
                    label=_require(raw_opt, "label", f"option of {node_id}"),
                    legal_ref=raw_opt.get("legal_ref", ""),
                )
            )
        nodes.append(
            QuestionNode(
                id=node_id,
                prompt=_require(raw, "prompt", f"node {node_id}"),
                answer_mode=mode,
                options=tuple(options),
                legal_ref=raw.get("legal_ref", ""),
                phrasing_note=raw.get("phrasing_note"),
            )
        )

    rules = []
    for raw in raw_rules:
        from_node = _require(raw, "from", "rule")
        pred_s = _require(raw, "predicate", f"rule of {from_node}")
        try:
            predicate = Predicate(pred_s)
        except ValueError:
            raise ParseError(
                f"rule of {from_node}: unknown predicate {pred_s!r}", field="predicate"
            ) from None
        actions = []
        for raw_act in raw.get("actions", []):
            kind = _require(raw_act, "kind", f"action of {from_node}")
            if kind not in ("add_label", "short_circuit"):
                raise ParseError(
                    f"action of {from_node}: unknown kind {kind!r}", field="kind"
                )
            actions.append(
                OutcomeAction(
                    kind=kind,
                    label=RiskLabel.parse(_require(raw_act, "label", f"action of {from_node}")),
                    basis=raw_act.get("basis", ""),
                )
            )
        rules.append(
            TransitionRule(
                from_node=from_node,
                predicate=predicate,
                actions=tuple(actions),
                next=_require(raw, "next", f"rule of {from_node}"),
            )
        )

    return DecisionGraph(
        start=start, nodes=tuple(nodes), rules=tuple(rules), version=str(version)
    )


def load_graph(document: dict) -> DecisionGraph:
    """Parse and validate a graph document; the result is safe to traverse.

    Raises:
        ParseError: malformed document.
        ValidationError: structurally broken graph; carries the full report.
    """
    graph = parse_graph_document(document)
    report = validate_graph(graph)
    if not report.ok:
        raise ValidationError(
            f"graph document violates {len(report.violations)} invariant(s)",
            violations=report.violations,
        )
    return graph


def load_graph_file(path: str | Path) -> DecisionGraph:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise ParseError(f"cannot read graph file: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"graph file is not valid JSON: {e}") from e
    return load_graph(doc)


# ---------------------------------------------------------------------------
# Validation


def validate_graph(graph: DecisionGraph) -> ValidationReport:
    """Check every structural invariant; violations are data, not failures.

    Checks: id uniqueness, option shape (sentinel included), rule totality and
    bucket exclusivity per node, edge integrity, short-circuit termination,
    acyclicity, reachability from start, and outcome exclusivity over all
    binarized paths. Termination of every maximal path follows from totality
    plus acyclicity over finitely many nodes.
    """
    violations: list[Violation] = []

    seen_nodes = set()
    for node in graph.nodes:
        if node.id in seen_nodes:
            violations.append(
                Violation(ViolationKind.DUPLICATE_NODE, node.id, "node id declared twice")
            )
        seen_nodes.add(node.id)

        seen_opts = set()
        for opt in node.options:
            if opt.id in seen_opts:
                violations.append(
                    Violation(
                        ViolationKind.DUPLICATE_OPTION,
                        node.id,
                        f"option id {opt.id!r} declared twice",
                    )
                )
            seen_opts.add(opt.id)

        if node.answer_mode is AnswerMode.BINARY and node.options:
            violations.append(
                Violation(
                    ViolationKind.OPTIONS_ON_BINARY, node.id, "binary node carries options"
                )
            )
        if node.answer_mode is AnswerMode.MULTI_SELECT:
            if NONE_OPTION_ID not in seen_opts:
                violations.append(
                    Violation(
                        ViolationKind.MISSING_NONE_SENTINEL,
                        node.id,
                        "multi-select node lacks the 'none of the above' option",
                    )
                )
            if not (seen_opts - {NONE_OPTION_ID}):
                violations.append(
                    Violation(
                        ViolationKind.MISSING_OPTIONS,
                        node.id,
                        "multi-select node has no selectable options",
                    )
                )

    node_ids = {n.id for n in graph.nodes}
    if graph.start not in node_ids:
        violations.append(
            Violation(
                ViolationKind.UNKNOWN_START, graph.start, "start is not a declared node"
            )
        )

    buckets: dict[str, list[Predicate]] = {n.id: [] for n in graph.nodes}
    for rule in graph.rules:
        if rule.from_node not in node_ids:
            violations.append(
                Violation(
                    ViolationKind.RULE_FOR_UNKNOWN_NODE,
                    rule.from_node,
                    f"rule declared for unknown node ({rule.predicate.value})",
                )
            )
            continue
        buckets[rule.from_node].append(rule.predicate)
        if rule.next != TERMINAL and rule.next not in node_ids:
            violations.append(
                Violation(
                    ViolationKind.DANGLING_EDGE,
                    rule.from_node,
                    f"rule {rule.predicate.value} points to unknown node {rule.next!r}",
                )
            )
        for action in rule.actions:
            if action.kind == "short_circuit" and rule.next != TERMINAL:
                violations.append(
                    Violation(
                        ViolationKind.SHORT_CIRCUIT_NOT_TERMINAL,
                        rule.from_node,
                        f"short_circuit on {rule.predicate.value} continues to {rule.next!r}",
                    )
                )

    traversal_safe = True
    for node in graph.nodes:
        required = REQUIRED_PREDICATES[node.answer_mode]
        present = buckets.get(node.id, [])
        for predicate in sorted(required, key=lambda p: p.value):
            count = present.count(predicate)
            if count == 0:
                violations.append(
                    Violation(
                        ViolationKind.NON_TOTAL_NODE,
                        node.id,
                        f"no rule for answer bucket {predicate.value}",
                    )
                )
                traversal_safe = False
            elif count > 1:
                violations.append(
                    Violation(
                        ViolationKind.CONFLICTING_RULES,
                        node.id,
                        f"{count} rules for answer bucket {predicate.value}",
                    )
                )
                traversal_safe = False
        for predicate in set(present) - required:
            violations.append(
                Violation(
                    ViolationKind.PREDICATE_MISMATCH,
                    node.id,
                    f"predicate {predicate.value} does not fit a {node.answer_mode.value} node",
                )
            )
            traversal_safe = False

    # Edges for cycle/reachability checks; skip dangling targets.
    adjacency: dict[str, list[str]] = {n: [] for n in node_ids}
    for rule in graph.rules:
        if rule.from_node in node_ids and rule.next in node_ids:
            adjacency[rule.from_node].append(rule.next)

    cycle = _find_cycle(adjacency)
    if cycle:
        violations.append(
            Violation(ViolationKind.CYCLE, cycle[0], " -> ".join(cycle))
        )
        traversal_safe = False

    if graph.start in node_ids:
        reachable = _reachable_from(adjacency, graph.start)
        for node_id in sorted(node_ids - reachable):
            violations.append(
                Violation(
                    ViolationKind.UNREACHABLE_NODE, node_id, "not reachable from start"
                )
            )
    else:
        traversal_safe = False

    if traversal_safe and not any(
        v.kind in (ViolationKind.DANGLING_EDGE, ViolationKind.DUPLICATE_NODE)
        for v in violations
    ):
        for path, outcome_labels in _fold_binarized_paths(graph):
            folded = outcome_labels or (OutcomeLabel(LABEL_LOW, LOW_BASIS),)
            problems = exclusivity_violations(ol.label for ol in folded)
            for problem in problems:
                violations.append(
                    Violation(
                        ViolationKind.EXCLUSIVITY,
                        path[-1][0] if path else graph.start,
                        problem,
                    )
                )

    return ValidationReport(violations=tuple(violations))


def _find_cycle(adjacency: dict[str, list[str]]) -> list[str] | None:
    """First cycle found by DFS, as a node list closing on itself."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in adjacency}
    stack: list[str] = []

    def dfs(u: str) -> list[str] | None:
        color[u] = GREY
        stack.append(u)
        for v in adjacency[u]:
            if color[v] == GREY:
                i = stack.index(v)
                return stack[i:] + [v]
            if color[v] == WHITE:
                found = dfs(v)
                if found:
                    return found
        stack.pop()
        color[u] = BLACK
        return None

    for n in sorted(adjacency):
        if color[n] == WHITE:
            found = dfs(n)
            if found:
                return found
    return None


def _reachable_from(adjacency: dict[str, list[str]], start: str) -> set[str]:
    seen = {start}
    frontier = [start]
    while frontier:
        u = frontier.pop()
        for v in adjacency[u]:
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


# ---------------------------------------------------------------------------
# Traversal

History = Sequence[tuple[str, AnswerValue]]


def _walk(graph: DecisionGraph, history: History) -> Iterator[tuple[QuestionNode, AnswerValue, TransitionRule]]:
    """Yield (node, coerced answer, rule) per history step, enforcing prefix validity."""
    expected = graph.start
    for node_id, answer in history:
        if expected == TERMINAL:
            raise InvalidPrefix(f"history continues past TERMINAL at {node_id!r}")
        if node_id != expected:
            raise InvalidPrefix(
                f"expected answer for {expected!r}, got {node_id!r}", field="node_id"
            )
        node = graph.node(node_id)
        coerced = coerce_answer(node, answer)
        rule = graph.rule_for(node_id, coerced)
        yield node, coerced, rule
        expected = rule.next


def next_question(graph: DecisionGraph, history: History) -> str:
    """The node id due after a valid prefix path, or TERMINAL.

    Raises:
        InvalidPrefix: history does not follow the graph from start.
        IllegalAnswer: an answer does not fit its node.
    """
    expected = graph.start
    for _, _, rule in _walk(graph, history):
        expected = rule.next
    return expected


def classify(graph: DecisionGraph, history: History) -> RiskOutcomeSet:
    """Fold a complete path into its risk outcome set.

    The outcome is the set of labels attached along the path; an empty fold
    yields the LOW singleton. Deterministic: identical histories produce
    identical outcome sets, rationale in traversal order.

    Raises:
        IncompletePath: history stops before TERMINAL.
    """
    labels: list[OutcomeLabel] = []
    rationale: list[RationaleEntry] = []
    expected = graph.start
    for node, answer, rule in _walk(graph, history):
        rationale.append(
            RationaleEntry(
                node_id=node.id,
                answer=answer,
                predicate=rule.predicate,
                next=rule.next,
                legal_ref=node.legal_ref,
                actions=rule.actions,
            )
        )
        for action in rule.actions:
            labels.append(OutcomeLabel(action.label, action.basis))
        expected = rule.next
    if expected != TERMINAL:
        raise IncompletePath(f"path ends at {expected!r}, not TERMINAL")
    if not labels:
        labels.append(OutcomeLabel(LABEL_LOW, LOW_BASIS))
    return RiskOutcomeSet(labels=_sorted_labels(labels), rationale=tuple(rationale))


# Binarized answers and their DFS order per mode: yes before no, none before some.
BINARIZED_ORDER = {
    AnswerMode.BINARY: (("yes", Predicate.IS_YES), ("no", Predicate.IS_NO)),
    AnswerMode.MULTI_SELECT: (
        ("none", Predicate.NONE_SELECTED),
        ("some", Predicate.ANY_SELECTED),
    ),
}

BinarizedPath = tuple[tuple[str, str], ...]


def _fold_binarized_paths(
    graph: DecisionGraph,
) -> Iterator[tuple[BinarizedPath, tuple[OutcomeLabel, ...]]]:
    """DFS over {yes,no}/{none,some} branches, folding rule actions directly."""
    max_depth = len(graph.nodes)

    def recurse(node_id: str, path: list, labels: tuple):
        if len(path) > max_depth:
            raise InvalidPrefix("path longer than node count; graph is not acyclic")
        node = graph.node(node_id)
        for binarized, predicate in BINARIZED_ORDER[node.answer_mode]:
            rule = graph._rule_index.get((node_id, predicate))
            if rule is None:
                raise InvalidPrefix(f"no rule for {node_id}/{predicate.value}")
            new_labels = labels + tuple(
                OutcomeLabel(a.label, a.basis) for a in rule.actions
            )
            step = path + [(node_id, binarized)]
            if rule.next == TERMINAL:
                yield tuple(step), new_labels
            else:
                yield from recurse(rule.next, step, new_labels)

    yield from recurse(graph.start, [], ())


def materialize_answer(node: QuestionNode, binarized: str) -> AnswerValue:
    """A representative concrete answer for one binarized branch."""
    if binarized == "yes":
        return AnswerValue.yes()
    if binarized == "no":
        return AnswerValue.no()
    if binarized == "none":
        return AnswerValue.selection()
    ids = sorted(node.selectable_ids())
    if not ids:
        raise IllegalAnswer(f"{node.id} has no selectable options")
    return AnswerValue.selection([ids[0]])


def enumerate_paths(
    graph: DecisionGraph,
) -> list[tuple[BinarizedPath, RiskOutcomeSet]]:
    """Exhaustive, duplicate-free table of all maximal binarized paths.

    Depth-first, yes/none-first order. Outcomes come from the rule fold at
    binarized granularity; rationale entries carry representative answers
    (first selectable option for "some").
    """
    table = []
    for path, labels in _fold_binarized_paths(graph):
        history = [
            (node_id, materialize_answer(graph.node(node_id), binarized))
            for node_id, binarized in path
        ]
        rationale = []
        for node, answer, rule in _walk(graph, history):
            rationale.append(
                RationaleEntry(
                    node_id=node.id,
                    answer=answer,
                    predicate=rule.predicate,
                    next=rule.next,
                    legal_ref=node.legal_ref,
                    actions=rule.actions,
                )
            )
        final = labels or (OutcomeLabel(LABEL_LOW, LOW_BASIS),)
        table.append(
            (path, RiskOutcomeSet(labels=_sorted_labels(final), rationale=tuple(rationale)))
        )
    return table

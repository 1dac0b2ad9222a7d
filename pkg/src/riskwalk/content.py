"""Content bundle: the shipped classification graph plus layered support.

Support materials attach guidance to questions or individual options; worked
examples are complete answer paths with a declared outcome and are replayed
through the classifier whenever a bundle loads, so stale content fails fast.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import (
    DanglingAttachment,
    ExampleMismatch,
    ParseError,
    UnknownNode,
)
from .graph import (
    AnswerValue,
    DecisionGraph,
    RiskLabel,
    RiskOutcomeSet,
    classify,
    load_graph,
)

SHIPPED_GRAPH = "rcs-v1.json"
SHIPPED_CATALOG = "support-v1.json"


class SupportKind(str, Enum):
    DEFINITION_GUIDANCE = "definition_guidance"
    WORKED_EXAMPLE = "worked_example"
    LEGAL_TEXT_LINK = "legal_text_link"
    EXPERT_CONTACT = "expert_contact"


# Presentation order of support buttons on a question.
_KIND_ORDER = {
    SupportKind.DEFINITION_GUIDANCE: 0,
    SupportKind.WORKED_EXAMPLE: 1,
    SupportKind.LEGAL_TEXT_LINK: 2,
    SupportKind.EXPERT_CONTACT: 3,
}


@dataclass(frozen=True)
class SupportMaterial:
    id: str
    kind: SupportKind
    attached_to: str  # node id or option id ("<node>/<option>")
    title: str
    body: str
    external_url: str | None = None

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "kind": self.kind.value,
            "attached_to": self.attached_to,
            "title": self.title,
            "body": self.body,
        }
        if self.external_url:
            out["external_url"] = self.external_url
        return out


@dataclass(frozen=True)
class WorkedExample:
    """A fully answered system whose declared outcome must replay cleanly."""

    id: str
    system: str
    answers: tuple[tuple[str, AnswerValue], ...]
    expected: frozenset[RiskLabel]
    rationale: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "system": self.system,
            "answers": [
                {"node": node_id, "answer": ans.to_json()} for node_id, ans in self.answers
            ],
            "expected": sorted(str(l) for l in self.expected),
            "rationale": self.rationale,
        }

    def replay(self, graph: DecisionGraph) -> RiskOutcomeSet:
        return classify(graph, self.answers)


@dataclass(frozen=True)
class SupportCatalog:
    version: str
    materials: tuple[SupportMaterial, ...]
    examples: tuple[WorkedExample, ...]

    def materials_for(self, graph: DecisionGraph, node_id: str) -> list[SupportMaterial]:
        """All materials for a question, including its options' materials.

        Order is fixed for the UI: definitions, examples, legal links, expert
        contact; catalog order within a kind.

        Raises:
            UnknownNode: node_id is not part of the graph.
        """
        if not graph.has_node(node_id):
            raise UnknownNode(f"unknown node {node_id!r}", field="node_id")
        node = graph.node(node_id)
        targets = {node_id} | {f"{node_id}/{oid}" for oid in node.option_ids()}
        hits = [m for m in self.materials if m.attached_to in targets]
        return sorted(hits, key=lambda m: _KIND_ORDER[m.kind])

    def material(self, material_id: str) -> SupportMaterial | None:
        for m in self.materials:
            if m.id == material_id:
                return m
        return None

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "materials": [m.to_dict() for m in self.materials],
            "examples": [e.to_dict() for e in self.examples],
        }


def fill_expert_contact(catalog: SupportCatalog, name: str, email: str) -> SupportCatalog:
    """Substitute the configured expert into expert-contact placeholders."""
    materials = tuple(
        replace(m, body=m.body.format(name=name, email=email))
        if m.kind is SupportKind.EXPERT_CONTACT
        else m
        for m in catalog.materials
    )
    return replace(catalog, materials=materials)


def _parse_answers(raw_answers, ctx: str) -> tuple[tuple[str, AnswerValue], ...]:
    steps = []
    for raw in raw_answers:
        if "node" not in raw or "answer" not in raw:
            raise ParseError(f"{ctx}: answer steps need node and answer fields")
        steps.append((raw["node"], AnswerValue.from_json(raw["answer"])))
    return tuple(steps)


def parse_catalog_document(doc: dict) -> SupportCatalog:
    if not isinstance(doc, dict):
        raise ParseError("support catalog must be an object")
    for key in ("version", "materials", "examples"):
        if key not in doc:
            raise ParseError(f"support catalog: missing field {key!r}", field=key)

    materials = []
    for raw in doc["materials"]:
        try:
            kind = SupportKind(raw["kind"])
        except (KeyError, ValueError):
            raise ParseError(
                f"material {raw.get('id', '?')}: bad or missing kind", field="kind"
            ) from None
        materials.append(
            SupportMaterial(
                id=raw["id"],
                kind=kind,
                attached_to=raw["attached_to"],
                title=raw.get("title", ""),
                body=raw.get("body", ""),
                external_url=raw.get("external_url"),
            )
        )

    examples = []
    for raw in doc["examples"]:
        examples.append(
            WorkedExample(
                id=raw["id"],
                system=raw.get("system", ""),
                answers=_parse_answers(raw["answers"], f"example {raw['id']}"),
                expected=frozenset(RiskLabel.parse(s) for s in raw["expected"]),
                rationale=raw.get("rationale", ""),
            )
        )

    return SupportCatalog(
        version=str(doc["version"]),
        materials=tuple(materials),
        examples=tuple(examples),
    )


def load_content_bundle(
    graph_doc: dict, catalog_doc: dict
) -> tuple[DecisionGraph, SupportCatalog]:
    """Load and cross-check a graph plus its support catalog.

    Raises:
        DanglingAttachment: a material points at a node/option not in the graph.
        ExampleMismatch: a worked example replays to a different outcome.
        ParseError: malformed documents or a catalog/graph version mismatch.
    """
    graph = load_graph(graph_doc)
    catalog = parse_catalog_document(catalog_doc)

    if catalog.version != graph.version:
        raise ParseError(
            f"support catalog version {catalog.version!r} is locked to a different "
            f"graph version than {graph.version!r}",
            field="version",
        )

    valid_targets = set()
    for node in graph.nodes:
        valid_targets.add(node.id)
        for opt in node.options:
            valid_targets.add(f"{node.id}/{opt.id}")
    for material in catalog.materials:
        if material.attached_to not in valid_targets:
            raise DanglingAttachment(
                f"material {material.id!r} attached to unknown target "
                f"{material.attached_to!r}",
                field="attached_to",
            )

    for example in catalog.examples:
        outcome = example.replay(graph)
        if outcome.label_set != example.expected:
            raise ExampleMismatch(
                f"worked example {example.id!r} replays to "
                f"{sorted(str(l) for l in outcome.label_set)}, declared "
                f"{sorted(str(l) for l in example.expected)}"
            )

    return graph, catalog


def load_bundle_files(
    graph_path: str | Path, catalog_path: str | Path | None = None
) -> tuple[DecisionGraph, SupportCatalog]:
    """Load a bundle from disk; catalog defaults to <graph-dir>/support-*.json pairing."""
    graph_path = Path(graph_path)
    if catalog_path is None:
        candidate = graph_path.with_name(graph_path.name.replace("rcs-", "support-"))
        catalog_path = candidate
    try:
        graph_doc = json.loads(graph_path.read_text(encoding="utf-8"))
        catalog_doc = json.loads(Path(catalog_path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read bundle: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"bundle is not valid JSON: {e}") from e
    return load_content_bundle(graph_doc, catalog_doc)


def shipped_bundle() -> tuple[DecisionGraph, SupportCatalog]:
    """The packaged EU AI Act bundle."""
    data = resources.files("riskwalk") / "data"
    graph_doc = json.loads((data / SHIPPED_GRAPH).read_text(encoding="utf-8"))
    catalog_doc = json.loads((data / SHIPPED_CATALOG).read_text(encoding="utf-8"))
    return load_content_bundle(graph_doc, catalog_doc)


def shipped_graph_path() -> Path:
    return Path(str(resources.files("riskwalk") / "data" / SHIPPED_GRAPH))

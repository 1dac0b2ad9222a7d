"""Seeded document mutations for validation fuzzing.

Each mutation takes a deep copy of a graph document and breaks exactly one
structural invariant, returning the violation kind the validator must
report. Mutations may knock on other violations (orphaning a subtree, for
example); callers assert membership of the expected kind, not equality.
"""

import copy
import random

from riskwalk.graph import ViolationKind


def _nodes(doc, mode=None):
    return [n for n in doc["nodes"] if mode is None or n["answer_mode"] == mode]


def _rules_from(doc, node_id=None):
    return [r for r in doc["rules"] if node_id is None or r["from"] == node_id]


def mutate_dangling_edge(doc, rng):
    rule = rng.choice([r for r in doc["rules"] if r["next"] != "TERMINAL"])
    rule["next"] = "Q99-missing"
    return ViolationKind.DANGLING_EDGE


def mutate_missing_rule(doc, rng):
    doc["rules"].remove(rng.choice(doc["rules"]))
    return ViolationKind.NON_TOTAL_NODE


def mutate_cycle(doc, rng):
    # Every node is reachable from the start, so pointing any rule back at
    # the start closes a loop.
    rule = rng.choice(doc["rules"])
    rule["next"] = doc["start"]
    return ViolationKind.CYCLE


def mutate_duplicate_node(doc, rng):
    doc["nodes"].append(copy.deepcopy(rng.choice(doc["nodes"])))
    return ViolationKind.DUPLICATE_NODE


def mutate_unknown_start(doc, rng):
    doc["start"] = "Q0-missing"
    return ViolationKind.UNKNOWN_START


def mutate_unreachable_node(doc, rng):
    doc["nodes"].append(
        {"id": "Q9z", "prompt": "orphan", "answer_mode": "binary"}
    )
    doc["rules"].append(
        {"from": "Q9z", "predicate": "is_yes", "next": "TERMINAL", "actions": []}
    )
    doc["rules"].append(
        {"from": "Q9z", "predicate": "is_no", "next": "TERMINAL", "actions": []}
    )
    return ViolationKind.UNREACHABLE_NODE


def mutate_wrong_predicate(doc, rng):
    binary_ids = {n["id"] for n in _nodes(doc, "binary")}
    rule = rng.choice([r for r in doc["rules"] if r["from"] in binary_ids])
    rule["predicate"] = "any_selected"
    return ViolationKind.PREDICATE_MISMATCH


def mutate_conflicting_rules(doc, rng):
    clone = copy.deepcopy(rng.choice(doc["rules"]))
    clone["next"] = "TERMINAL"
    clone["actions"] = []
    doc["rules"].append(clone)
    return ViolationKind.CONFLICTING_RULES


def mutate_drop_none_sentinel(doc, rng):
    node = rng.choice(_nodes(doc, "multi_select"))
    node["options"] = [o for o in node["options"] if o["id"] != "none"]
    return ViolationKind.MISSING_NONE_SENTINEL


def mutate_short_circuit_continue(doc, rng):
    candidates = [
        r
        for r in doc["rules"]
        if any(a.get("kind") == "short_circuit" for a in r.get("actions", []))
    ]
    rule = rng.choice(candidates)
    targets = [n["id"] for n in doc["nodes"] if n["id"] != rule["from"]]
    rule["next"] = rng.choice(targets)
    return ViolationKind.SHORT_CIRCUIT_NOT_TERMINAL


def mutate_options_on_binary(doc, rng):
    node = rng.choice(_nodes(doc, "binary"))
    node["options"] = [{"id": "stray", "label": "stray"}]
    return ViolationKind.OPTIONS_ON_BINARY


def mutate_missing_options(doc, rng):
    node = rng.choice(_nodes(doc, "multi_select"))
    node["options"] = []
    return ViolationKind.MISSING_OPTIONS


def mutate_duplicate_option(doc, rng):
    node = rng.choice(_nodes(doc, "multi_select"))
    node["options"].append(copy.deepcopy(node["options"][0]))
    return ViolationKind.DUPLICATE_OPTION


def mutate_rule_for_unknown_node(doc, rng):
    doc["rules"].append(
        {
            "from": "Q88-missing",
            "predicate": "is_yes",
            "next": "TERMINAL",
            "actions": [],
        }
    )
    return ViolationKind.RULE_FOR_UNKNOWN_NODE


MUTATIONS = [
    mutate_dangling_edge,
    mutate_missing_rule,
    mutate_cycle,
    mutate_duplicate_node,
    mutate_unknown_start,
    mutate_unreachable_node,
    mutate_wrong_predicate,
    mutate_conflicting_rules,
    mutate_drop_none_sentinel,
    mutate_short_circuit_continue,
    mutate_options_on_binary,
    mutate_missing_options,
    mutate_duplicate_option,
    mutate_rule_for_unknown_node,
]


def mutated_documents(base_doc, count, seed=0):
    """Yield (mutation name, mutated doc, expected kind), cycling mutations."""
    rng = random.Random(seed)
    for index in range(count):
        mutation = MUTATIONS[index % len(MUTATIONS)]
        doc = copy.deepcopy(base_doc)
        expected = mutation(doc, rng)
        yield mutation.__name__, doc, expected

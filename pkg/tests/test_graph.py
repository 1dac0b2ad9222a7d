import copy

import pytest

from riskwalk.errors import (
    IllegalAnswer,
    IncompletePath,
    InvalidPrefix,
    ParseError,
    ValidationError,
)
from riskwalk.graph import (
    TERMINAL,
    AnswerMode,
    AnswerValue,
    RiskCategory,
    RiskLabel,
    ViolationKind,
    classify,
    coerce_answer,
    enumerate_paths,
    load_graph,
    next_question,
    parse_graph_document,
    validate_graph,
)

from conftest import (
    chatbot_path,
    high_risk_path,
    low_risk_path,
    unacceptable_path,
)
from oracle_walk import walk_paths


def to_history(steps):
    return [(node, AnswerValue.from_json(raw)) for node, raw in steps]


class TestAnswerValue:
    def test_roundtrip_binary(self):
        assert AnswerValue.from_json("yes").to_json() == "yes"
        assert AnswerValue.from_json("no").to_json() == "no"

    def test_roundtrip_selection_sorted(self):
        value = AnswerValue.from_json(["b", "a"])
        assert value.to_json() == ["a", "b"]

    def test_rejects_malformed(self):
        with pytest.raises(ParseError):
            AnswerValue.from_json(3)
        with pytest.raises(ParseError):
            AnswerValue.from_json([1, 2])

    def test_exactly_one_payload(self):
        with pytest.raises(ValueError):
            AnswerValue(choice=True, selected=frozenset())
        with pytest.raises(ValueError):
            AnswerValue()


class TestCoerceAnswer:
    def test_none_sentinel_collapses_to_empty(self, graph):
        node = graph.node("Q1b")
        coerced = coerce_answer(node, AnswerValue.selection(["none"]))
        assert coerced.selected == frozenset()

    def test_none_sentinel_with_others_is_illegal(self, graph):
        node = graph.node("Q1b")
        with pytest.raises(IllegalAnswer):
            coerce_answer(node, AnswerValue.selection(["none", "scientific-research"]))

    def test_unknown_option_rejected(self, graph):
        with pytest.raises(IllegalAnswer):
            coerce_answer(graph.node("Q3"), AnswerValue.selection(["bogus"]))

    def test_mode_mismatch_rejected(self, graph):
        with pytest.raises(IllegalAnswer):
            coerce_answer(graph.node("Q1a"), AnswerValue.selection([]))
        with pytest.raises(IllegalAnswer):
            coerce_answer(graph.node("Q1b"), AnswerValue.yes())


class TestRiskLabel:
    def test_limited_requires_basis(self):
        with pytest.raises(ValueError):
            RiskLabel(category=RiskCategory.LIMITED, sub_basis=None)

    def test_serialized_form(self):
        label = RiskLabel.parse("LIMITED(Art50_2)")
        assert label.category is RiskCategory.LIMITED
        assert str(label) == "LIMITED(Art50_2)"
        assert RiskLabel.parse("HIGH").sub_basis is None

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError):
            RiskLabel.parse("MEDIUM")


class TestShippedGraph:
    def test_validates_clean(self, graph_doc):
        graph = load_graph(graph_doc)
        assert validate_graph(graph).ok

    def test_eleven_nodes(self, graph):
        assert len(graph.nodes) == 11
        assert graph.start == "Q1a"

    def test_q4a_has_twenty_selectable_options(self, graph):
        assert len(graph.node("Q4a").selectable_ids()) == 20

    def test_multi_select_nodes_have_none_sentinel(self, graph):
        for node in graph.nodes:
            if node.answer_mode is AnswerMode.MULTI_SELECT:
                assert "none" in node.option_ids()


class TestTraversal:
    def test_start_question(self, graph):
        assert next_question(graph, []) == "Q1a"

    def test_advance(self, graph):
        assert next_question(graph, to_history([("Q1a", "yes")])) == "Q1b"
        assert next_question(graph, to_history([("Q1a", "no")])) == TERMINAL

    def test_prefix_violation(self, graph):
        with pytest.raises(InvalidPrefix):
            next_question(graph, to_history([("Q2", "yes")]))

    def test_history_past_terminal(self, graph):
        history = to_history(unacceptable_path() + [("Q4a", [])])
        with pytest.raises(InvalidPrefix):
            next_question(graph, history)


class TestClassify:
    def test_unacceptable_exemplar(self, graph):
        outcome = classify(graph, to_history(unacceptable_path()))
        assert {str(l.label) for l in outcome.labels} == {"UNACCEPTABLE"}

    def test_high_exemplar(self, graph):
        outcome = classify(graph, to_history(high_risk_path()))
        assert {str(l.label) for l in outcome.labels} == {"HIGH"}

    def test_limited_exemplar(self, graph):
        outcome = classify(graph, to_history(chatbot_path()))
        assert {str(l.label) for l in outcome.labels} == {"LIMITED(Art50_1)"}

    def test_low_exemplar(self, graph):
        outcome = classify(graph, to_history(low_risk_path()))
        assert {str(l.label) for l in outcome.labels} == {"LOW"}

    def test_incomplete_path_rejected(self, graph):
        with pytest.raises(IncompletePath):
            classify(graph, to_history(chatbot_path()[:-1]))

    def test_short_circuit_ignores_downstream(self, graph):
        outcome = classify(graph, to_history(unacceptable_path()))
        assert outcome.rationale[-1].node_id == "Q3"
        assert outcome.rationale[-1].next == TERMINAL

    def test_annex_iii_derogation_routes_to_low(self, graph):
        history = to_history(
            [
                ("Q1a", "yes"),
                ("Q1b", []),
                ("Q2", "yes"),
                ("Q3", []),
                ("Q4a", []),
                ("Q4b", ["critical-infrastructure"]),
                ("Q4c", ["preparatory-task"]),
                ("Q4d", "no"),
                ("Q5a", "no"),
                ("Q5b", "no"),
                ("Q5c", "no"),
            ]
        )
        outcome = classify(graph, history)
        assert {str(l.label) for l in outcome.labels} == {"LOW"}

    def test_derogation_void_under_profiling(self, graph):
        history = to_history(
            [
                ("Q1a", "yes"),
                ("Q1b", []),
                ("Q2", "yes"),
                ("Q3", []),
                ("Q4a", []),
                ("Q4b", ["critical-infrastructure"]),
                ("Q4c", ["preparatory-task"]),
                ("Q4d", "yes"),
                ("Q5a", "no"),
                ("Q5b", "no"),
                ("Q5c", "no"),
            ]
        )
        outcome = classify(graph, history)
        assert {str(l.label) for l in outcome.labels} == {"HIGH"}

    def test_high_and_limited_co_occur(self, graph):
        history = to_history(
            [
                ("Q1a", "yes"),
                ("Q1b", []),
                ("Q2", "yes"),
                ("Q3", []),
                ("Q4a", []),
                ("Q4b", ["employment"]),
                ("Q4c", []),
                ("Q5a", "yes"),
                ("Q5b", "no"),
                ("Q5c", "no"),
            ]
        )
        outcome = classify(graph, history)
        assert {str(l.label) for l in outcome.labels} == {"HIGH", "LIMITED(Art50_1)"}

    def test_rationale_carries_legal_refs(self, graph):
        outcome = classify(graph, to_history(chatbot_path()))
        refs = {e.node_id: e.legal_ref for e in outcome.rationale}
        assert "50" in refs["Q5a"]
        assert "5" in refs["Q3"]


class TestEnumeration:
    def test_matches_independent_oracle(self, graph, graph_doc):
        oracle = {
            path: labels for path, labels in walk_paths(graph_doc)
        }
        engine = enumerate_paths(graph)
        assert len(engine) == len(oracle)
        for path, outcome in engine:
            assert path in oracle
            assert {str(l.label) for l in outcome.labels} == oracle[path]

    def test_no_low_with_other_labels(self, graph):
        for _, outcome in enumerate_paths(graph):
            labels = {str(l.label) for l in outcome.labels}
            if "LOW" in labels:
                assert labels == {"LOW"}

    def test_deterministic_order(self, graph):
        first = [p for p, _ in enumerate_paths(graph)]
        second = [p for p, _ in enumerate_paths(graph)]
        assert first == second
        assert first[0][0] == ("Q1a", "yes")


class TestValidatorRejections:
    def base(self, graph_doc):
        return copy.deepcopy(graph_doc)

    def kinds_of(self, doc):
        return validate_graph(parse_graph_document(doc)).kinds()

    def test_dangling_edge(self, graph_doc):
        doc = self.base(graph_doc)
        doc["rules"][2]["next"] = "Q77"
        assert ViolationKind.DANGLING_EDGE in self.kinds_of(doc)

    def test_cycle_detected(self, graph_doc):
        doc = self.base(graph_doc)
        for rule in doc["rules"]:
            if rule["from"] == "Q5c" and rule["predicate"] == "is_no":
                rule["next"] = "Q1a"
        assert ViolationKind.CYCLE in self.kinds_of(doc)

    def test_missing_rule_bucket(self, graph_doc):
        doc = self.base(graph_doc)
        doc["rules"] = [
            r
            for r in doc["rules"]
            if not (r["from"] == "Q2" and r["predicate"] == "is_no")
        ]
        assert ViolationKind.NON_TOTAL_NODE in self.kinds_of(doc)

    def test_load_graph_raises_with_violations(self, graph_doc):
        doc = self.base(graph_doc)
        doc["start"] = "QQQ"
        with pytest.raises(ValidationError) as excinfo:
            load_graph(doc)
        kinds = {v.kind for v in excinfo.value.violations}
        assert ViolationKind.UNKNOWN_START in kinds

    def test_parse_error_on_bad_enum(self, graph_doc):
        doc = self.base(graph_doc)
        doc["nodes"][0]["answer_mode"] = "ternary"
        with pytest.raises(ParseError):
            parse_graph_document(doc)

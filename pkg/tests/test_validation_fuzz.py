import json
import random

import pytest

from riskwalk.content import shipped_graph_path
from riskwalk.graph import parse_graph_document, validate_graph

from mutators import MUTATIONS, mutated_documents


def base_document() -> dict:
    with open(shipped_graph_path(), encoding="utf-8") as fh:
        return json.load(fh)


def run_validator(doc: dict):
    return validate_graph(parse_graph_document(doc))


def test_shipped_document_is_clean():
    report = run_validator(base_document())
    assert report.ok, report.violations


@pytest.mark.parametrize("mutate", MUTATIONS, ids=lambda m: m.__name__)
def test_each_mutation_class_is_caught(mutate):
    doc = base_document()
    expected = mutate(doc, random.Random(7))
    report = run_validator(doc)
    assert not report.ok
    assert expected in report.kinds()


def test_randomized_mutation_batch():
    failures = []
    for name, doc, expected in mutated_documents(base_document(), 140):
        report = run_validator(doc)
        if report.ok or expected not in report.kinds():
            failures.append((name, expected, report.kinds()))
    assert not failures, failures


def test_mutations_do_not_leak_into_base():
    doc = base_document()
    rng = random.Random(11)
    for mutate in MUTATIONS:
        mutate(base_document(), rng)
    assert run_validator(doc).ok

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from riskwalk.content import shipped_bundle, shipped_graph_path

T0 = datetime(2026, 3, 1, 9, 0, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def bundle():
    return shipped_bundle()


@pytest.fixture(scope="session")
def graph(bundle):
    return bundle[0]


@pytest.fixture(scope="session")
def catalog(bundle):
    return bundle[1]


@pytest.fixture(scope="session")
def graph_doc():
    return json.loads(shipped_graph_path().read_text(encoding="utf-8"))


@pytest.fixture
def ticker():
    """Deterministic clock: each call advances one second from T0."""
    state = {"now": T0}

    def clock() -> datetime:
        state["now"] += timedelta(seconds=1)
        return state["now"]

    return clock


def chatbot_path():
    """Answer vector for a purely conversational, non-generative system."""
    return [
        ("Q1a", "yes"),
        ("Q1b", []),
        ("Q2", "yes"),
        ("Q3", []),
        ("Q4a", []),
        ("Q4b", []),
        ("Q5a", "yes"),
        ("Q5b", "no"),
        ("Q5c", "no"),
    ]


def low_risk_path():
    return [
        ("Q1a", "yes"),
        ("Q1b", []),
        ("Q2", "yes"),
        ("Q3", []),
        ("Q4a", []),
        ("Q4b", []),
        ("Q5a", "no"),
        ("Q5b", "no"),
        ("Q5c", "no"),
    ]


def high_risk_path():
    return [
        ("Q1a", "yes"),
        ("Q1b", []),
        ("Q2", "yes"),
        ("Q3", []),
        ("Q4a", []),
        ("Q4b", ["critical-infrastructure"]),
        ("Q4c", []),
        ("Q5a", "no"),
        ("Q5b", "no"),
        ("Q5c", "no"),
    ]


def unacceptable_path():
    return [
        ("Q1a", "yes"),
        ("Q1b", []),
        ("Q2", "yes"),
        ("Q3", ["social-scoring"]),
    ]

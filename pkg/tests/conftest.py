from pathlib import Path

import pytest

from hanso.annotation import (
    AnnotatedDocument,
    DocumentLabels,
    Entity,
    EntityType,
    LabelClass,
    Relation,
    Span,
    append_marker,
)

DATA = Path(__file__).parent / "data"


def make_entity(text, tid, etype, subtype, phrase, occurrence=0):
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(phrase, start + 1)
    return Entity(tid, EntityType(etype), subtype, Span(start, start + len(phrase)), phrase)


PAIR_BODY = "There are new left midlung, basilar opacities. No pneumothorax."


@pytest.fixture
def annotator_pair():
    """The same sentence annotated by two annotators with different region spans."""
    text = append_marker(PAIR_BODY)
    a = AnnotatedDocument(
        "pair",
        text,
        (
            make_entity(text, "T1", "side", "unilateral", "left"),
            make_entity(text, "T2", "region", "parenchymal", "midlung, basilar opacities"),
        ),
        (Relation("R1", "T2", "T1"),),
        DocumentLabels(LabelClass.UNILATERAL, LabelClass.NONE),
    )
    b = AnnotatedDocument(
        "pair",
        text,
        (
            make_entity(text, "T1", "side", "unilateral", "left"),
            make_entity(text, "T2", "region", "parenchymal", "opacities"),
        ),
        (Relation("R1", "T2", "T1"),),
        DocumentLabels(LabelClass.UNILATERAL, LabelClass.NONE),
    )
    return a, b


@pytest.fixture
def golden_doc():
    text = append_marker("Bilateral patchy opacities. No pleural effusion.")
    return AnnotatedDocument(
        "fixture",
        text,
        (
            make_entity(text, "T1", "side", "bilateral", "Bilateral"),
            make_entity(text, "T2", "region", "parenchymal", "opacities"),
            make_entity(text, "T3", "region", "extraparenchymal", "pleural effusion"),
        ),
        (Relation("R1", "T2", "T1"),),
        DocumentLabels(LabelClass.BILATERAL, LabelClass.PRESENT),
    )


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])

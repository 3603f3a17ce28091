"""Annotation data model for chest radiograph reports and a standoff codec.

A report carries entities (``region``, ``side``, ``size``, ``negation``),
``attr`` relations from a region to one of its attributes, and two
document-level labels. The labels are attached to a marker line appended
to the report text; in the ``.ann`` file each label is an attribute on an
entity spanning its half of the marker.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

MARKER = "<< INFILTRATES >> << EXTRAPARENCHYMAL >>"
# Typeset rendering of the same marker; identical length so offsets survive.
_MARKER_ALT = "⟨⟨ INFILTRATES ⟩⟩ ⟨⟨ EXTRAPARENCHYMAL ⟩⟩"
_INF_MARK = "<< INFILTRATES >>"
_EXP_MARK = "<< EXTRAPARENCHYMAL >>"

INF_LABEL_TYPE = "infiltrates_label"
EXP_LABEL_TYPE = "extraparenchymal_label"


class LabelClass(str, enum.Enum):
    NONE = "none"
    PRESENT = "present"
    UNILATERAL = "unilateral"
    BILATERAL = "bilateral"

    @property
    def index(self) -> int:
        return LABEL_CLASSES.index(self)


LABEL_CLASSES = tuple(LabelClass)


class EntityType(str, enum.Enum):
    REGION = "region"
    SIDE = "side"
    SIZE = "size"
    NEGATION = "negation"


ABSENT = "absent"

REGION_SUBTYPES = frozenset({"parenchymal", "extraparenchymal"})
SIDE_SUBTYPES = frozenset({"unilateral", "bilateral"})
ATTRIBUTE_TYPES = frozenset({EntityType.SIDE, EntityType.SIZE, EntityType.NEGATION})


def subtype_is_legal(etype: EntityType, subtype: str) -> bool:
    if etype is EntityType.REGION:
        return subtype in REGION_SUBTYPES
    if etype is EntityType.SIDE:
        return subtype in SIDE_SUBTYPES
    if etype is EntityType.NEGATION:
        return subtype == ABSENT
    # size subtypes are free strings
    return bool(subtype) and not any(c.isspace() for c in subtype)


class AnnotationError(Exception):
    pass


class ParseError(AnnotationError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class OffsetRangeError(AnnotationError):
    pass


class SchemaError(AnnotationError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class MarkerError(AnnotationError):
    pass


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class Entity:
    id: str
    etype: EntityType
    subtype: str
    span: Span
    text: str

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end


@dataclass(frozen=True)
class Relation:
    id: str
    head: str
    tail: str


@dataclass(frozen=True)
class DocumentLabels:
    infiltrates: LabelClass = LabelClass.NONE
    extraparenchymal: LabelClass = LabelClass.NONE

    def __getitem__(self, head: str) -> LabelClass:
        return getattr(self, head)


LABEL_HEADS = ("infiltrates", "extraparenchymal")


def _id_key(ident: str) -> tuple:
    m = re.fullmatch(r"([A-Za-z]*)(\d+)", ident)
    if m:
        return (m.group(1), int(m.group(2)), ident)
    return (ident, -1, ident)


def _entity_key(e: Entity) -> tuple:
    return (e.span.start, _id_key(e.id))


@dataclass(frozen=True)
class AnnotatedDocument:
    """A report with its annotations.

    Entities and relations are stored in canonical order (entities by start
    offset then id, relations by id) so that equality is order-insensitive.
    """

    doc_id: str
    text: str
    entities: tuple[Entity, ...] = ()
    relations: tuple[Relation, ...] = ()
    labels: DocumentLabels = field(default_factory=DocumentLabels)

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(sorted(self.entities, key=_entity_key)))
        object.__setattr__(self, "relations", tuple(sorted(self.relations, key=lambda r: _id_key(r.id))))

    def entity_map(self) -> dict[str, Entity]:
        return {e.id: e for e in self.entities}

    @property
    def body_end(self) -> int:
        """Offset of the newline that precedes the marker line."""
        return max(len(self.text) - len(MARKER) - 1, 0)


def append_marker(text: str) -> str:
    """Append the document-label marker line to a report body."""
    if text.endswith(MARKER):
        raise MarkerError("report text already ends with the document-label marker")
    return text + "\n" + MARKER


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    item_id: str
    detail: str = ""

    def __str__(self):
        return f"{self.rule}({self.item_id}){': ' + self.detail if self.detail else ''}"


def validate(doc: AnnotatedDocument) -> list[Violation]:
    """Check every schema invariant; returns an empty list for a valid doc."""
    out: list[Violation] = []
    text = doc.text
    if text.count(MARKER) != 1 or not text.endswith("\n" + MARKER):
        out.append(Violation("MarkerRule", doc.doc_id, "marker must appear once as the final line"))
    body_end = doc.body_end

    seen: dict[str, Entity] = {}
    for e in doc.entities:
        if e.id in seen:
            out.append(Violation("DuplicateIdRule", e.id))
            continue
        seen[e.id] = e
        if not isinstance(e.etype, EntityType):
            out.append(Violation("EntityTypeRule", e.id, str(e.etype)))
            continue
        if not subtype_is_legal(e.etype, e.subtype):
            out.append(Violation("SubtypeRule", e.id, f"{e.etype.value}/{e.subtype}"))
        if not (0 <= e.span.start < e.span.end <= len(text)):
            out.append(Violation("SpanRangeRule", e.id, f"{e.span.start}..{e.span.end}"))
        elif e.span.end > body_end:
            out.append(Violation("MarkerSpanRule", e.id, "entity overlaps the marker line"))
        elif text[e.span.start:e.span.end] != e.text:
            out.append(Violation("TextSpanRule", e.id, repr(e.text)))

    rel_ids = set()
    for r in doc.relations:
        if r.id in rel_ids or r.id in seen:
            out.append(Violation("DuplicateIdRule", r.id))
            continue
        rel_ids.add(r.id)
        head, tail = seen.get(r.head), seen.get(r.tail)
        if head is None or tail is None:
            out.append(Violation("DanglingRule", r.id, f"{r.head}->{r.tail}"))
            continue
        if r.head == r.tail:
            out.append(Violation("SelfRelationRule", r.id))
            continue
        if head.etype is not EntityType.REGION:
            out.append(Violation("UnidirectionalRule", r.id, f"head {r.head} is {head.etype.value}"))
        if tail.etype not in ATTRIBUTE_TYPES:
            out.append(Violation("TailTypeRule", r.id, f"tail {r.tail} is {tail.etype.value}"))

    for name in LABEL_HEADS:
        if not isinstance(doc.labels[name], LabelClass):
            out.append(Violation("LabelRule", doc.doc_id, name))
    return out


# --------------------------------------------------------------------------
# standoff format

_T_LINE = re.compile(r"(T\d+)\t(\S+) (\d+) (\d+)\t(.*)")
_A_LINE = re.compile(r"(A\d+)\t(subtype|label) (T\d+) (\S+)")
_R_LINE = re.compile(r"(R\d+)\tattr Arg1:(T\d+) Arg2:(T\d+)")


def _normalize_text(txt: str) -> str:
    if txt.endswith("\n") and (txt[:-1].endswith(MARKER) or txt[:-1].endswith(_MARKER_ALT)):
        txt = txt[:-1]
    if txt.endswith(_MARKER_ALT):
        txt = txt[: -len(_MARKER_ALT)] + MARKER
    if not txt.endswith("\n" + MARKER):
        raise MarkerError("report text must end with the document-label marker line")
    return txt


def parse_standoff(txt: str, ann: str, doc_id: str = "") -> AnnotatedDocument:
    """Parse a ``.txt``/``.ann`` pair into a validated document.

    Raises:
        ParseError: a line of ``ann`` is malformed (carries the line number).
        OffsetRangeError: an entity offset lies outside the text.
        SchemaError: the parsed document breaks a schema rule.
    """
    raw = txt
    text = _normalize_text(txt)
    spans: dict[str, tuple[str, int, int, str]] = {}
    attrs: list[tuple[int, str, str, str]] = []
    rels: list[Relation] = []

    for line_no, line in enumerate(ann.split("\n"), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if line[0] == "T":
            m = _T_LINE.fullmatch(line)
            if not m:
                raise ParseError(line_no, f"malformed entity line {line!r}")
            tid, etype, s, e, covered = m.groups()
            s, e = int(s), int(e)
            if not (0 <= s < e <= len(raw)):
                raise OffsetRangeError(f"line {line_no}: span {s}..{e} outside text of length {len(raw)}")
            if tid in spans:
                raise ParseError(line_no, f"duplicate id {tid}")
            spans[tid] = (etype, s, e, covered)
        elif line[0] == "A":
            m = _A_LINE.fullmatch(line)
            if not m:
                raise ParseError(line_no, f"malformed attribute line {line!r}")
            attrs.append((line_no, m.group(2), m.group(3), m.group(4)))
        elif line[0] == "R":
            m = _R_LINE.fullmatch(line)
            if not m:
                raise ParseError(line_no, f"malformed relation line {line!r}")
            rels.append(Relation(m.group(1), m.group(2), m.group(3)))
        else:
            raise ParseError(line_no, f"unknown record type {line!r}")

    subtypes: dict[str, str] = {}
    labels = {}
    for line_no, name, target, value in attrs:
        if target not in spans:
            raise ParseError(line_no, f"attribute refers to unknown entity {target}")
        etype = spans[target][0]
        if name == "label":
            head = {INF_LABEL_TYPE: "infiltrates", EXP_LABEL_TYPE: "extraparenchymal"}.get(etype)
            if head is None:
                raise ParseError(line_no, f"label attribute on non-marker entity {target}")
            try:
                labels[head] = LabelClass(value)
            except ValueError:
                raise SchemaError([Violation("LabelRule", target, value)]) from None
        else:
            if target in subtypes:
                raise ParseError(line_no, f"second subtype for {target}")
            subtypes[target] = value

    entities = []
    for tid, (etype, s, e, covered) in spans.items():
        if etype in (INF_LABEL_TYPE, EXP_LABEL_TYPE):
            if raw[s:e] != covered:
                raise SchemaError([Violation("TextSpanRule", tid, repr(covered))])
            continue
        try:
            et = EntityType(etype)
        except ValueError:
            raise SchemaError([Violation("EntityTypeRule", tid, etype)]) from None
        subtype = ABSENT if et is EntityType.NEGATION and tid not in subtypes else subtypes.get(tid, "")
        entities.append(Entity(tid, et, subtype, Span(s, e), covered))

    doc = AnnotatedDocument(
        doc_id=doc_id,
        text=text,
        entities=tuple(entities),
        relations=tuple(rels),
        labels=DocumentLabels(**labels),
    )
    violations = validate(doc)
    if violations:
        raise SchemaError(violations)
    return doc


def serialize_standoff(doc: AnnotatedDocument) -> tuple[str, str]:
    """Render ``doc`` as ``(txt, ann)`` strings in canonical order."""
    lines = []
    attr_lines = []
    n_attr = 0
    for e in doc.entities:
        lines.append(f"{e.id}\t{e.etype.value} {e.span.start} {e.span.end}\t{e.text}")
        if e.etype is not EntityType.NEGATION:
            n_attr += 1
            attr_lines.append(f"A{n_attr}\tsubtype {e.id} {e.subtype}")

    used = [_id_key(e.id)[1] for e in doc.entities if e.id.startswith("T")]
    next_t = max(used, default=0) + 1
    marker_start = len(doc.text) - len(MARKER)
    inf_span = (marker_start, marker_start + len(_INF_MARK))
    exp_start = marker_start + len(_INF_MARK) + 1
    exp_span = (exp_start, exp_start + len(_EXP_MARK))
    for offset, (etype, (s, e), head) in enumerate(
        [(INF_LABEL_TYPE, inf_span, "infiltrates"), (EXP_LABEL_TYPE, exp_span, "extraparenchymal")]
    ):
        tid = f"T{next_t + offset}"
        lines.append(f"{tid}\t{etype} {s} {e}\t{doc.text[s:e]}")
        n_attr += 1
        attr_lines.append(f"A{n_attr}\tlabel {tid} {doc.labels[head].value}")

    rel_lines = [f"{r.id}\tattr Arg1:{r.head} Arg2:{r.tail}" for r in doc.relations]
    ann = "\n".join(lines + attr_lines + rel_lines) + "\n"
    return doc.text, ann

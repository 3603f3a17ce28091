"""Seeded synthetic radiograph reports with planted annotations.

Reports are assembled from template clauses that carry their own entity and
relation annotations. Document labels are first sampled from the configured
class distributions, realized by one planted clause per positive head, then
decorated with label-neutral extras (negated findings, additional sided or
unsided findings, size modifiers, distractor sentences). The final labels are
recomputed from the planted relations with :func:`derive_labels`, so they are
true by construction.

Alongside each document the generator records, from its own bookkeeping,
which sentence received which relation flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .annotation import (
    AnnotatedDocument,
    DocumentLabels,
    Entity,
    EntityType,
    LABEL_HEADS,
    LabelClass,
    Relation,
    Span,
    append_marker,
)
from .labelmap import SENTENCE_TASKS, task_for

_HEAD_SUBTYPE = {"infiltrates": "parenchymal", "extraparenchymal": "extraparenchymal"}

_REGIONS = {
    "parenchymal": ["opacities", "airspace opacities", "consolidation", "infiltrates", "airspace disease",
                    "ground-glass opacities", "patchy opacities", "interstitial opacities"],
    "extraparenchymal": ["pleural effusions", "effusions", "atelectasis", "pneumothorax", "nodules",
                         "pleural fluid", "volume loss"],
}
_LOCS = ["basilar", "midlung", "perihilar", "upper lobe", "lower lobe", "apical"]
_UNI = ["left", "right"]
_SIZES = ["small", "mild", "moderate", "large", "trace"]

_DISTRACTORS = [
    "The cardiomediastinal silhouette is within normal limits",
    "Support lines and tubes are unchanged in position",
    "Endotracheal tube terminates 4 cm above the carina",
    "Heart size is normal",
    "The osseous structures are intact",
    "Enteric tube courses below the diaphragm",
    "Comparison is made to the prior study",
    "Portable AP view of the chest",
]

DEFAULT_CLASS_PROBS = {
    "infiltrates": {"none": 0.25, "present": 0.20, "unilateral": 0.20, "bilateral": 0.35},
    "extraparenchymal": {"none": 0.57, "present": 0.15, "unilateral": 0.14, "bilateral": 0.14},
}


@dataclass(frozen=True)
class GenConfig:
    n_docs: int = 100
    seed: int = 0
    class_probs: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_CLASS_PROBS.items()})
    entity_rates: dict = field(
        default_factory=lambda: {"region": 3.0, "side": 1.3, "negation": 0.8, "size": 0.2}
    )
    sentence_range: tuple[int, int] = (3, 8)
    noise_rate: float = 0.3
    compound_rate: float = 0.25
    newline_rate: float = 0.3
    header_rate: float = 0.5
    id_prefix: str = "synth"

    def __post_init__(self):
        for head in LABEL_HEADS:
            probs = self.class_probs[head]
            if set(probs) - {c.value for c in LabelClass}:
                raise ValueError(f"{head}: unknown classes {sorted(set(probs))}")
            if any(p < 0 for p in probs.values()) or abs(sum(probs.values()) - 1.0) > 1e-9:
                raise ValueError(f"{head}: class probabilities must be non-negative and sum to 1")
        lo, hi = self.sentence_range
        if not 1 <= lo <= hi:
            raise ValueError("sentence_range must satisfy 1 <= min <= max")
        for name in ("noise_rate", "compound_rate", "newline_rate", "header_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        d = dict(d)
        if "class_probs" in d:
            merged = {k: dict(v) for k, v in DEFAULT_CLASS_PROBS.items()}
            merged.update(d["class_probs"])
            d["class_probs"] = merged
        if "entity_rates" in d:
            d["entity_rates"] = {**cls().entity_rates, **d["entity_rates"]}
        if "sentence_range" in d:
            d["sentence_range"] = tuple(d["sentence_range"])
        return cls(**d)


@dataclass
class GroundTruth:
    doc_id: str
    labels: DocumentLabels
    sentence_flags: np.ndarray  # (n_sentences, 6)
    entity_counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "labels": {h: self.labels[h].value for h in LABEL_HEADS},
            "sentence_flags": self.sentence_flags.tolist(),
            "entity_counts": self.entity_counts,
        }


# --------------------------------------------------------------------------
# clauses


@dataclass
class Clause:
    # (text, local entity key or None)
    parts: list[tuple[str, str | None]]
    ents: dict[str, tuple[EntityType, str]]
    rels: list[tuple[str, str]]
    region: str | None = None  # subtype of the clause's region
    negated: bool = False


def _sided_clause(rng, subtype: str, side: str) -> Clause:
    region = str(rng.choice(_REGIONS[subtype]))
    if side == "bilateral":
        form = rng.integers(3)
        if form == 0:
            parts = [("bilateral", "s"), (" ", None), (region, "r")]
        elif form == 1:
            parts = [(region, "r"), (" in ", None), ("both lungs", "s")]
        else:
            parts = [("bilateral", "s"), (f" {rng.choice(_LOCS)} ", None), (region, "r")]
    else:
        word = str(rng.choice(_UNI))
        form = rng.integers(3)
        if form == 0:
            parts = [(word, "s"), (" ", None), (region, "r")]
        elif form == 1:
            parts = [(region, "r"), (" in the ", None), (word, "s"), (" lung", None)]
        else:
            parts = [(word, "s"), (f" {rng.choice(_LOCS)} ", None), (region, "r")]
    return Clause(
        parts,
        {"r": (EntityType.REGION, subtype), "s": (EntityType.SIDE, side)},
        [("r", "s")],
        region=subtype,
    )


def _unsided_clause(rng, subtype: str) -> Clause:
    region = str(rng.choice(_REGIONS[subtype]))
    form = rng.integers(3)
    if form == 0:
        parts = [(region, "r"), (" are again noted", None)]
    elif form == 1:
        parts = [("there is increased ", None), (region, "r")]
    else:
        parts = [(f"{rng.choice(_LOCS)} ", None), (region, "r")]
    return Clause(parts, {"r": (EntityType.REGION, subtype)}, [], region=subtype)


def _negated_clause(rng, subtype: str) -> Clause:
    region = str(rng.choice(_REGIONS[subtype]))
    form = rng.integers(3)
    if form == 0:
        parts = [("no", "n"), (" ", None), (region, "r")]
    elif form == 1:
        parts = [("there is ", None), ("no", "n"), (" ", None), (region, "r")]
    else:
        parts = [("no", "n"), (" evidence of ", None), (region, "r")]
    return Clause(
        parts,
        {"r": (EntityType.REGION, subtype), "n": (EntityType.NEGATION, "absent")},
        [("r", "n")],
        region=subtype,
        negated=True,
    )


def _add_size(rng, clause: Clause) -> None:
    word = str(rng.choice(_SIZES))
    clause.parts = [(word, "z"), (" ", None)] + clause.parts
    clause.ents["z"] = (EntityType.SIZE, word)
    clause.rels.append(("r", "z"))


def derive_labels(clauses: list[Clause]) -> DocumentLabels:
    """Document labels implied by planted clauses.

    Per head: bilateral if any bilateral side relation, else unilateral if any
    unilateral side relation, else present if any non-negated region, else none.
    """
    out = {}
    for head in LABEL_HEADS:
        sub = _HEAD_SUBTYPE[head]
        sides = set()
        present = False
        for c in clauses:
            if c.region != sub:
                continue
            if not c.negated:
                present = True
            for h, t in c.rels:
                etype, st = c.ents[t]
                if etype is EntityType.SIDE:
                    sides.add(st)
        if "bilateral" in sides:
            out[head] = LabelClass.BILATERAL
        elif "unilateral" in sides:
            out[head] = LabelClass.UNILATERAL
        elif present:
            out[head] = LabelClass.PRESENT
        else:
            out[head] = LabelClass.NONE
    return DocumentLabels(**out)


class _Rates:
    """Poisson rates for the label-neutral extras, chosen so the expected
    per-report entity counts meet ``entity_rates``."""

    def __init__(self, config: GenConfig):
        pos = {h: 1.0 - config.class_probs[h].get("none", 0.0) for h in LABEL_HEADS}
        sided = {
            h: config.class_probs[h].get("unilateral", 0.0) + config.class_probs[h].get("bilateral", 0.0)
            for h in LABEL_HEADS
        }
        rates = config.entity_rates
        q_pos, q_side = sum(pos.values()), sum(sided.values())
        self.neg = rates["negation"]
        self.side = max(rates["side"] / q_side - 1.0, 0.0) if q_side > 0 else 0.0
        gap = rates["region"] - q_pos - self.neg - q_side * self.side
        self.region = max(gap / q_pos, 0.0) if q_pos > 0 else 0.0
        unnegated = max(rates["region"] - self.neg, 1e-9)
        self.size = min(rates["size"] / unnegated, 1.0)


def _sample_class(rng, probs: dict) -> LabelClass:
    names = [c.value for c in LabelClass]
    p = np.array([probs.get(n, 0.0) for n in names])
    return LabelClass(names[rng.choice(len(names), p=p / p.sum())])


def _plan_clauses(rng, config: GenConfig, rates: _Rates) -> list[Clause]:
    clauses = []
    for head in LABEL_HEADS:
        sub = _HEAD_SUBTYPE[head]
        label = _sample_class(rng, config.class_probs[head])
        if label in (LabelClass.UNILATERAL, LabelClass.BILATERAL):
            clauses.append(_sided_clause(rng, sub, label.value))
            for _ in range(rng.poisson(rates.side)):
                side = label.value if label is LabelClass.UNILATERAL else str(rng.choice(["unilateral", "bilateral"]))
                clauses.append(_sided_clause(rng, sub, side))
        elif label is LabelClass.PRESENT:
            clauses.append(_unsided_clause(rng, sub))
        if label is not LabelClass.NONE:
            for _ in range(rng.poisson(rates.region)):
                clauses.append(_unsided_clause(rng, sub))
    for _ in range(rng.poisson(rates.neg)):
        clauses.append(_negated_clause(rng, str(rng.choice(list(_HEAD_SUBTYPE.values())))))
    for c in clauses:
        if not c.negated and rng.random() < rates.size:
            _add_size(rng, c)
    order = rng.permutation(len(clauses))
    return [clauses[i] for i in order]


def _group_sentences(rng, config: GenConfig, clauses: list[Clause]) -> list[list[Clause] | str]:
    """Group clauses into sentences and interleave distractor sentences."""
    sentences: list = []
    for c in clauses:
        if (
            c.negated
            and sentences
            and isinstance(sentences[-1], list)
            and len(sentences[-1]) == 1
            and rng.random() < config.compound_rate
        ):
            sentences[-1].append(c)
        else:
            sentences.append([c])
    lo, hi = config.sentence_range
    target = int(rng.integers(lo, hi + 1))
    n_distract = max(target - len(sentences), 0) + int(rng.binomial(2, config.noise_rate))
    for _ in range(n_distract):
        pos = int(rng.integers(len(sentences) + 1))
        sentences.insert(pos, str(rng.choice(_DISTRACTORS)))
    return sentences


def _instantiate(doc_id: str, rng, config: GenConfig, sentences: list) -> tuple[AnnotatedDocument, GroundTruth, list[Clause]]:
    text_parts: list[str] = []
    length = 0
    entities: list[Entity] = []
    relations: list[Relation] = []
    flags = []
    all_clauses = []
    n_ent = 0

    def emit(s: str):
        nonlocal length
        text_parts.append(s)
        length += len(s)

    if rng.random() < config.header_rate:
        emit("FINDINGS:\n")
        flags.append(np.zeros(len(SENTENCE_TASKS), dtype=np.uint8))

    for si, sent in enumerate(sentences):
        if si > 0:
            emit("\n" if rng.random() < config.newline_rate else " ")
        row = np.zeros(len(SENTENCE_TASKS), dtype=np.uint8)
        if isinstance(sent, str):
            emit(sent + ".")
            flags.append(row)
            continue
        first = True
        for ci, clause in enumerate(sent):
            if ci > 0:
                emit(", " if rng.random() < 0.5 else " and ")
            ids = {}
            for text, key in clause.parts:
                if first:
                    text = text[0].upper() + text[1:]
                    first = False
                if key is not None:
                    n_ent += 1
                    ids[key] = f"T{n_ent}"
                    etype, sub = clause.ents[key]
                    entities.append(Entity(ids[key], etype, sub, Span(length, length + len(text)), text))
                emit(text)
            for h, t in clause.rels:
                relations.append(Relation(f"R{len(relations) + 1}", ids[h], ids[t]))
                task = task_for(clause.ents[h][1], clause.ents[t][0], clause.ents[t][1])
                if task is not None:
                    row[SENTENCE_TASKS.index(task)] = 1
            all_clauses.append(clause)
        emit(".")
        flags.append(row)

    flags.append(np.zeros(len(SENTENCE_TASKS), dtype=np.uint8))  # marker line
    text = append_marker("".join(text_parts))
    labels = derive_labels(all_clauses)
    counts = {t.value: sum(1 for e in entities if e.etype is t) for t in EntityType}
    doc = AnnotatedDocument(doc_id, text, tuple(entities), tuple(relations), labels)
    truth = GroundTruth(doc_id, labels, np.stack(flags), counts)
    return doc, truth, all_clauses


def generate_with_truth(config: GenConfig) -> tuple[list[AnnotatedDocument], list[GroundTruth]]:
    rates = _Rates(config)
    docs, truths = [], []
    width = max(5, len(str(config.n_docs)))
    for i in range(config.n_docs):
        rng = np.random.default_rng([config.seed, i])
        clauses = _plan_clauses(rng, config, rates)
        sentences = _group_sentences(rng, config, clauses)
        doc, truth, _ = _instantiate(f"{config.id_prefix}{i:0{width}d}", rng, config, sentences)
        docs.append(doc)
        truths.append(truth)
    return docs, truths


def generate(config: GenConfig) -> list[AnnotatedDocument]:
    return generate_with_truth(config)[0]

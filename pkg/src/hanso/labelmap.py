"""Relation annotations to per-sentence binary targets.

Each ``attr`` relation becomes a flag on the sentence holding its region
entity: region-side relations map to ``(region subtype, side subtype)``
pairs and region-negation relations to ``(region subtype, negation)``.
Size relations are dropped. Flags are OR-ed, never counted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .annotation import AnnotatedDocument, EntityType
from .textproc import Sentence, segment, sentence_of


class SentenceTask(str, enum.Enum):
    PAR_UNI = "par_uni"
    PAR_BI = "par_bi"
    PAR_NEG = "par_neg"
    EXP_UNI = "exp_uni"
    EXP_BI = "exp_bi"
    EXP_NEG = "exp_neg"


SENTENCE_TASKS = tuple(SentenceTask)

TOWER_TASKS = {
    "infiltrates": (SentenceTask.PAR_UNI, SentenceTask.PAR_BI, SentenceTask.PAR_NEG),
    "extraparenchymal": (SentenceTask.EXP_UNI, SentenceTask.EXP_BI, SentenceTask.EXP_NEG),
}

_REGION_PREFIX = {"parenchymal": "par", "extraparenchymal": "exp"}
_TAIL_SUFFIX = {"unilateral": "uni", "bilateral": "bi"}


@dataclass(frozen=True)
class SentenceTargets:
    doc_id: str
    flags: np.ndarray  # (n_sentences, 6) uint8

    def __eq__(self, other):
        return (
            isinstance(other, SentenceTargets)
            and self.doc_id == other.doc_id
            and np.array_equal(self.flags, other.flags)
        )


def task_for(head_subtype: str, tail_type: EntityType, tail_subtype: str) -> SentenceTask | None:
    """The sentence task a relation contributes to, or ``None`` for size."""
    prefix = _REGION_PREFIX[head_subtype]
    if tail_type is EntityType.SIDE:
        return SentenceTask(f"{prefix}_{_TAIL_SUFFIX[tail_subtype]}")
    if tail_type is EntityType.NEGATION:
        return SentenceTask(f"{prefix}_neg")
    return None


def relations_to_sentence_labels(
    doc: AnnotatedDocument, sentences: list[Sentence] | None = None
) -> SentenceTargets:
    if sentences is None:
        sentences = segment(doc.text)
    flags = np.zeros((len(sentences), len(SENTENCE_TASKS)), dtype=np.uint8)
    ents = doc.entity_map()
    for rel in doc.relations:
        head, tail = ents[rel.head], ents[rel.tail]
        task = task_for(head.subtype, tail.etype, tail.subtype)
        if task is None:
            continue
        j = sentence_of(head.span.start, sentences, len(doc.text))
        flags[j, SENTENCE_TASKS.index(task)] = 1
    return SentenceTargets(doc.doc_id, flags)


def targets_for_tower(targets: SentenceTargets | np.ndarray, tower: str) -> np.ndarray:
    """Project the six-task flags onto the three tasks of one tower."""
    flags = targets.flags if isinstance(targets, SentenceTargets) else np.asarray(targets)
    cols = [SENTENCE_TASKS.index(t) for t in TOWER_TASKS[tower]]
    return flags[..., cols]

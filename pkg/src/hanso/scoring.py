"""Agreement and extraction scoring.

Entities are compared within ``(type, subtype)`` buckets under two criteria:

* **any overlap**: a gold and predicted span match if they share at least
  one token; spans are matched one-to-one (maximum bipartite matching) and
  counted as spans.
* **partial match**: the tokens covered by all gold spans of a bucket are
  compared with those covered by all predicted spans; counted as tokens.

Tokens are identified by document position, so the two criteria are well
defined even when annotators choose different span boundaries. Relations are
equivalent when both their head and tail entities are any-overlap
equivalent.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotation import (
    LABEL_CLASSES,
    LABEL_HEADS,
    AnnotatedDocument,
    DocumentLabels,
    Entity,
    EntityType,
    Relation,
)
from .textproc import Token, document_tokens


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def swapped(self) -> "MatchCounts":
        return MatchCounts(self.tp, self.fn, self.fp)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def prf(counts: MatchCounts) -> PRF:
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return PRF(p, r, f)


def sum_counts(counts: Iterable[MatchCounts]) -> MatchCounts:
    total = MatchCounts()
    for c in counts:
        total = total + c
    return total


# --------------------------------------------------------------------------
# matching primitives


def max_bipartite_matching(adj: Sequence[Sequence[int]], n_right: int) -> int:
    """Size of a maximum matching; ``adj[i]`` lists right nodes joinable to left ``i``.

    Augmenting-path search (Kuhn). Left nodes are tried in order and their
    candidates in list order, so the matching found is deterministic.
    """
    match_right = [-1] * n_right

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] < 0 or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    size = 0
    for u in range(len(adj)):
        if augment(u, [False] * n_right):
            size += 1
    return size


def token_positions(span_start: int, span_end: int, tokens: Sequence[Token]) -> frozenset[int]:
    """Indices of the tokens that intersect ``[span_start, span_end)``."""
    return frozenset(i for i, t in enumerate(tokens) if t.start < span_end and span_start < t.end)


def _bucket(e: Entity) -> tuple[str, str]:
    return (e.etype.value, e.subtype)


def _group(entities: Iterable[Entity]):
    groups = defaultdict(list)
    for e in entities:
        groups[_bucket(e)].append(e)
    return groups


def _one_to_one(gold_sets, pred_sets) -> MatchCounts:
    adj = [[j for j, p in enumerate(pred_sets) if g & p] for g in gold_sets]
    tp = max_bipartite_matching(adj, len(pred_sets))
    return MatchCounts(tp, len(pred_sets) - tp, len(gold_sets) - tp)


def match_entities_any_overlap(
    gold: Sequence[Entity], pred: Sequence[Entity], tokens: Sequence[Token]
) -> dict[tuple[str, str], MatchCounts]:
    """Per-bucket span counts under the any-overlap criterion."""
    g_groups, p_groups = _group(gold), _group(pred)
    out = {}
    for key in sorted(set(g_groups) | set(p_groups)):
        gs = [token_positions(e.span.start, e.span.end, tokens) for e in g_groups.get(key, [])]
        ps = [token_positions(e.span.start, e.span.end, tokens) for e in p_groups.get(key, [])]
        out[key] = _one_to_one(gs, ps)
    return out


def match_entities_partial(
    gold: Sequence[Entity], pred: Sequence[Entity], tokens: Sequence[Token]
) -> dict[tuple[str, str], MatchCounts]:
    """Per-bucket token counts under the partial-match criterion."""
    g_groups, p_groups = _group(gold), _group(pred)
    out = {}
    for key in sorted(set(g_groups) | set(p_groups)):
        G = set().union(*[token_positions(e.span.start, e.span.end, tokens) for e in g_groups.get(key, [])])
        P = set().union(*[token_positions(e.span.start, e.span.end, tokens) for e in p_groups.get(key, [])])
        out[key] = MatchCounts(len(G & P), len(P - G), len(G - P))
    return out


RELATION_BUCKETS = ("region-side", "region-negation", "region-size")


class DanglingRelationError(ValueError):
    pass


def _relation_bucket(tail: Entity) -> str:
    return f"region-{tail.etype.value}"


def match_relations(
    gold: Sequence[Relation],
    pred: Sequence[Relation],
    gold_entities: Mapping[str, Entity],
    pred_entities: Mapping[str, Entity],
    tokens: Sequence[Token],
) -> dict[str, MatchCounts]:
    """Per-bucket relation counts; buckets are keyed by the tail entity type."""

    def resolve(rels, ents):
        groups = defaultdict(list)
        for r in rels:
            if r.head not in ents or r.tail not in ents:
                raise DanglingRelationError(f"relation {r.id} refers to a missing entity")
            h, t = ents[r.head], ents[r.tail]
            groups[_relation_bucket(t)].append(
                (
                    _bucket(h),
                    token_positions(h.span.start, h.span.end, tokens),
                    _bucket(t),
                    token_positions(t.span.start, t.span.end, tokens),
                )
            )
        return groups

    g_groups = resolve(gold, gold_entities)
    p_groups = resolve(pred, pred_entities)
    out = {}
    for key in RELATION_BUCKETS:
        gs, ps = g_groups.get(key, []), p_groups.get(key, [])
        if not gs and not ps:
            continue
        adj = [
            [
                j
                for j, p in enumerate(ps)
                if g[0] == p[0] and g[2] == p[2] and g[1] & p[1] and g[3] & p[3]
            ]
            for g in gs
        ]
        tp = max_bipartite_matching(adj, len(ps))
        out[key] = MatchCounts(tp, len(ps) - tp, len(gs) - tp)
    return out


def _one_vs_rest(gold: Sequence, pred: Sequence, classes: Sequence) -> dict:
    out = {}
    for c in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, pred) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, pred) if g == c and p != c)
        out[c] = MatchCounts(tp, fp, fn)
    return out


def score_document_labels(
    gold: Sequence[DocumentLabels], pred: Sequence[DocumentLabels]
) -> dict[str, dict]:
    """Per-class one-vs-rest counts and pooled micro counts for each label head.

    For a single-label multiclass head the micro F1 equals accuracy.
    """
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels vs {len(pred)} predictions")
    out = {}
    for head in LABEL_HEADS:
        g = [x[head] for x in gold]
        p = [x[head] for x in pred]
        per_class = _one_vs_rest(g, p, LABEL_CLASSES)
        out[head] = {
            "per_class": {c.value: per_class[c] for c in LABEL_CLASSES},
            "micro": sum_counts(per_class.values()),
        }
    return out


def micro_f1(gold: Sequence, pred: Sequence, classes: Sequence) -> float:
    return prf(sum_counts(_one_vs_rest(gold, pred, classes).values())).f1


# --------------------------------------------------------------------------
# corpus-level report


@dataclass
class ScoreReport:
    """Corpus tallies; ``*_micro`` hold the pooled sums of each table."""

    any_overlap: dict[tuple[str, str], MatchCounts]
    partial: dict[tuple[str, str], MatchCounts]
    relations: dict[str, MatchCounts]
    documents: dict[str, dict]
    n_docs: int

    @property
    def any_overlap_micro(self) -> MatchCounts:
        return sum_counts(self.any_overlap.values())

    @property
    def partial_micro(self) -> MatchCounts:
        return sum_counts(self.partial.values())

    @property
    def relations_micro(self) -> MatchCounts:
        return sum_counts(self.relations.values())

    def to_json(self) -> dict:
        def row(c: MatchCounts) -> dict:
            s = prf(c)
            return {"tp": c.tp, "fp": c.fp, "fn": c.fn, "precision": s.precision, "recall": s.recall, "f1": s.f1}

        return {
            "n_docs": self.n_docs,
            "documents": {
                head: {
                    "per_class": {k: row(v) for k, v in d["per_class"].items()},
                    "micro": row(d["micro"]),
                }
                for head, d in self.documents.items()
            },
            "entities": {
                "any_overlap": {f"{t}/{s}": row(c) for (t, s), c in self.any_overlap.items()},
                "partial_match": {f"{t}/{s}": row(c) for (t, s), c in self.partial.items()},
                "any_overlap_micro": row(self.any_overlap_micro),
                "partial_match_micro": row(self.partial_micro),
            },
            "relations": {
                "per_pair": {k: row(v) for k, v in self.relations.items()},
                "micro": row(self.relations_micro),
            },
        }

    def to_table(self) -> str:
        lines = []

        def fmt(name, c):
            s = prf(c)
            lines.append(
                f"  {name:<32} {c.tp:>5} {c.fp:>5} {c.fn:>5}  {s.precision:5.2f} {s.recall:5.2f} {s.f1:5.2f}"
            )

        header = f"  {'':<32} {'TP':>5} {'FP':>5} {'FN':>5}  {'P':>5} {'R':>5} {'F1':>5}"
        lines.append(f"Documents ({self.n_docs})")
        for head, d in self.documents.items():
            lines.append(f" {head}")
            lines.append(header)
            for k, v in d["per_class"].items():
                fmt(k, v)
            fmt("micro", d["micro"])
        for title, table, micro in (
            ("Entities, any overlap (spans)", self.any_overlap, self.any_overlap_micro),
            ("Entities, partial match (tokens)", self.partial, self.partial_micro),
        ):
            lines.append(title)
            lines.append(header)
            for (t, s), c in table.items():
                fmt(f"{t}/{s}", c)
            fmt("micro", micro)
        lines.append("Relations")
        lines.append(header)
        for k, v in self.relations.items():
            fmt(k, v)
        fmt("micro", self.relations_micro)
        return "\n".join(lines)


def _merge(acc: dict, new: dict) -> None:
    for k, v in new.items():
        acc[k] = acc.get(k, MatchCounts()) + v


def score_corpus(gold_docs: Sequence[AnnotatedDocument], pred_docs: Sequence[AnnotatedDocument]) -> ScoreReport:
    """Score aligned documents (same order, same text) and pool the counts."""
    if len(gold_docs) != len(pred_docs):
        raise ValueError("gold and predicted corpora differ in size")
    any_acc: dict = {}
    part_acc: dict = {}
    rel_acc: dict = {}
    for g, p in zip(gold_docs, pred_docs):
        if g.text != p.text:
            raise ValueError(f"document {g.doc_id!r}: texts differ between annotation sets")
        tokens = document_tokens(g.text)
        _merge(any_acc, match_entities_any_overlap(g.entities, p.entities, tokens))
        _merge(part_acc, match_entities_partial(g.entities, p.entities, tokens))
        _merge(rel_acc, match_relations(g.relations, p.relations, g.entity_map(), p.entity_map(), tokens))
    documents = score_document_labels([d.labels for d in gold_docs], [d.labels for d in pred_docs])
    order = {t.value: i for i, t in enumerate(EntityType)}
    return ScoreReport(
        any_overlap=dict(sorted(any_acc.items(), key=lambda kv: (order[kv[0][0]], kv[0][1]))),
        partial=dict(sorted(part_acc.items(), key=lambda kv: (order[kv[0][0]], kv[0][1]))),
        relations={k: rel_acc[k] for k in RELATION_BUCKETS if k in rel_acc},
        documents=documents,
        n_docs=len(gold_docs),
    )

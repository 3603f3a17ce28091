"""Turn annotated documents into model inputs and corpus directories into documents."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .annotation import LABEL_HEADS, AnnotatedDocument, parse_standoff, serialize_standoff
from .embeddings import EmbeddingProvider
from .labelmap import relations_to_sentence_labels
from .model import HansoConfig
from .textproc import segment


@dataclass
class EncodedDocument:
    doc_id: str
    sentences: list[np.ndarray]  # per sentence (T_j, E), truncated
    labels: dict[str, int] | None
    flags: np.ndarray | None  # (J, 6), rows aligned with ``sentences``


def encode_document(
    doc: AnnotatedDocument,
    embedder: EmbeddingProvider,
    config: HansoConfig,
    binary: bool = False,
) -> EncodedDocument:
    """Segment, embed and truncate one document.

    Only the first ``max_sentences`` sentences and the first ``max_tokens``
    tokens of each are kept. With ``binary`` the labels become
    bilateral (1) vs not bilateral (0).
    """
    sents = segment(doc.text)
    flags = relations_to_sentence_labels(doc, sents).flags
    vecs = embedder.embed([s.token_texts for s in sents], doc.doc_id)
    keep = config.max_sentences
    sentences = [v[: config.max_tokens] for v in vecs[:keep]]
    labels = {}
    for head in LABEL_HEADS:
        idx = doc.labels[head].index
        labels[head] = int(idx == 3) if binary else idx
    return EncodedDocument(doc.doc_id, sentences, labels, flags[:keep])


def encode_corpus(docs, embedder, config, binary=False) -> list[EncodedDocument]:
    return [encode_document(d, embedder, config, binary=binary) for d in docs]


def load_corpus(directory: str | Path) -> list[AnnotatedDocument]:
    """Read every ``<id>.txt``/``<id>.ann`` pair in ``directory`` (sorted by id)."""
    directory = Path(directory)
    docs = []
    for txt_path in sorted(directory.glob("*.txt")):
        ann_path = txt_path.with_suffix(".ann")
        txt = txt_path.read_text(encoding="utf-8")
        ann = ann_path.read_text(encoding="utf-8") if ann_path.exists() else ""
        docs.append(parse_standoff(txt, ann, doc_id=txt_path.stem))
    return docs


def write_corpus(docs, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for d in docs:
        txt, ann = serialize_standoff(d)
        (directory / f"{d.doc_id}.txt").write_text(txt, encoding="utf-8", newline="\n")
        (directory / f"{d.doc_id}.ann").write_text(ann, encoding="utf-8", newline="\n")

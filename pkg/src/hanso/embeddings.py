"""Frozen token embedding providers.

Providers map a document's tokenized sentences to arrays of shape
``(n_tokens, dim)`` per sentence. They are never trained.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, sentences: Sequence[Sequence[str]], doc_id: str = "") -> list[np.ndarray]: ...

    def describe(self) -> dict: ...


class HashEmbedder:
    """Deterministic pseudo-embeddings keyed by (seed, token string).

    Components are drawn uniformly from [-1, 1] and the vector is rescaled to
    unit length. Position and context are ignored.
    """

    def __init__(self, dim: int = 768, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def vector(self, token: str) -> np.ndarray:
        v = self._cache.get(token)
        if v is None:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            rng = np.random.default_rng([self.seed, int.from_bytes(digest, "little")])
            v = rng.uniform(-1.0, 1.0, self.dim)
            v /= np.linalg.norm(v)
            v.flags.writeable = False
            self._cache[token] = v
        return v

    def embed(self, sentences, doc_id=""):
        return [
            np.stack([self.vector(t) for t in toks]) if toks else np.zeros((0, self.dim))
            for toks in sentences
        ]

    def describe(self) -> dict:
        return {"kind": "hash", "dim": self.dim, "seed": self.seed}


class PrecomputedEmbedder:
    """Vectors produced elsewhere (e.g. a frozen contextual encoder).

    The ``.npz`` file holds one array per document id with shape
    ``(n_tokens, dim)``, rows in document token order (sentences concatenated
    as produced by :func:`hanso.textproc.segment`).
    """

    def __init__(self, path: str | Path):
        self.path = str(path)
        self._data = np.load(path)
        keys = list(self._data.keys())
        if not keys:
            raise ValueError(f"{path}: no arrays")
        self.dim = int(self._data[keys[0]].shape[1])

    def embed(self, sentences, doc_id=""):
        if doc_id not in self._data:
            raise KeyError(f"no precomputed vectors for document {doc_id!r}")
        arr = np.asarray(self._data[doc_id], dtype=np.float64)
        n = sum(len(s) for s in sentences)
        if arr.shape != (n, self.dim):
            raise ValueError(f"document {doc_id!r}: expected ({n}, {self.dim}) vectors, got {arr.shape}")
        out, k = [], 0
        for toks in sentences:
            out.append(arr[k : k + len(toks)])
            k += len(toks)
        return out

    def describe(self) -> dict:
        return {"kind": "file", "dim": self.dim, "path": self.path}


def embedder_from_description(desc: dict, path: str | None = None) -> EmbeddingProvider:
    if desc["kind"] == "hash":
        return HashEmbedder(desc["dim"], desc["seed"])
    if desc["kind"] == "file":
        return PrecomputedEmbedder(path or desc["path"])
    raise ValueError(f"unknown embedder kind {desc['kind']!r}")

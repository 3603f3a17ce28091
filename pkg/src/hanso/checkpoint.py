"""Checkpoint directory layout.

::

    <dir>/manifest.json        format, version, model config, seed, embedder, tensor table
    <dir>/tensors/<name>.f32   raw little-endian IEEE-754 float32, C (row-major) order

Each tensor entry in the manifest lists ``name``, ``shape``, ``dtype``
(always ``"<f4"``), ``file`` (relative path) and ``nbytes``. Any reader that
can parse JSON and read a flat float32 array can load the weights.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .model import Hanso, HansoConfig

FORMAT = "hanso-checkpoint"
VERSION = 1


def save_checkpoint(model: Hanso, directory: str | Path, embedder: dict | None = None, extra: dict | None = None) -> Path:
    directory = Path(directory)
    (directory / "tensors").mkdir(parents=True, exist_ok=True)
    table = []
    for name in sorted(model.params):
        arr = np.ascontiguousarray(model.params[name], dtype="<f4")
        rel = f"tensors/{name}.f32"
        (directory / rel).write_bytes(arr.tobytes(order="C"))
        table.append({"name": name, "shape": list(arr.shape), "dtype": "<f4", "file": rel, "nbytes": arr.nbytes})
    manifest = {
        "format": FORMAT,
        "version": VERSION,
        "config": dataclasses.asdict(model.config),
        "seed": model.config.seed,
        "embedder": embedder,
        "tensors": table,
    }
    if extra:
        manifest["extra"] = extra
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return directory


def load_checkpoint(directory: str | Path) -> tuple[Hanso, dict]:
    """Load a checkpoint; returns the model (float64 weights) and the manifest."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    if manifest.get("format") != FORMAT:
        raise ValueError(f"{directory}: not a {FORMAT} directory")
    if manifest.get("version") != VERSION:
        raise ValueError(f"{directory}: unsupported checkpoint version {manifest.get('version')}")
    config = HansoConfig(**manifest["config"])
    params = {}
    for entry in manifest["tensors"]:
        raw = (directory / entry["file"]).read_bytes()
        if len(raw) != entry["nbytes"]:
            raise ValueError(f"{entry['name']}: expected {entry['nbytes']} bytes, found {len(raw)}")
        params[entry["name"]] = np.frombuffer(raw, dtype="<f4").reshape(entry["shape"]).astype(np.float64)
    return Hanso(config, params), manifest

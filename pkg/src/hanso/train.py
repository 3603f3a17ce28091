"""Optimization loop, fold splitting and cross-validation for HANSO."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .model import TOWERS, Hanso, HansoConfig, make_batch
from .scoring import micro_f1

log = logging.getLogger(__name__)

RECIPES = {
    "lite": {"dropout": 0.1, "epochs": 400, "batch_size": 40},
    "full": {"dropout": 0.2, "epochs": 150, "batch_size": 10},
}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.002
    g_max: float = 1.0
    epochs: int = 150
    batch_size: int = 10
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    folds: int = 3
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "g_max", "epochs", "batch_size", "eps", "folds"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")


def recipe(variant: str, **overrides) -> tuple[dict, TrainConfig]:
    """Model overrides and training config for the named variant's recipe."""
    r = RECIPES[variant]
    tc = TrainConfig(epochs=r["epochs"], batch_size=r["batch_size"])
    tc = replace(tc, **overrides)
    return {"variant": variant, "dropout": r["dropout"]}, tc


class NonFiniteGradient(FloatingPointError):
    pass


@dataclass
class AdamState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params, grads, state: AdamState, lr=0.002, beta1=0.9, beta2=0.999, eps=1e-8) -> AdamState:
    """In-place Adam update with bias correction; returns the advanced state."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient for {name}")
    t = state.step + 1
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for name, g in grads.items():
        m = state.m.get(name)
        if m is None:
            m = state.m[name] = np.zeros_like(g)
            state.v[name] = np.zeros_like(g)
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        params[name] -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    state.step = t
    return state


def global_norm(grads) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_grad_norm(grads, g_max: float):
    """Scale every gradient by ``g_max / n`` when the global L2 norm ``n`` exceeds ``g_max``."""
    if g_max <= 0:
        raise ValueError("g_max must be positive")
    n = global_norm(grads)
    if n > g_max:
        scale = g_max / n
        return {k: g * scale for k, g in grads.items()}
    return grads


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    train_f1: list[float] = field(default_factory=list)
    val_f1: list[float] = field(default_factory=list)
    grad_norm: list[float] = field(default_factory=list)

    def to_rows(self) -> list[dict]:
        rows = []
        for e in range(len(self.loss)):
            row = {"epoch": e + 1, "loss": self.loss[e], "train_micro_f1": self.train_f1[e]}
            if self.val_f1:
                row["val_micro_f1"] = self.val_f1[e]
            rows.append(row)
        return rows


def _mean_micro_f1(gold: dict, pred: dict, n_classes: int) -> float:
    classes = range(n_classes)
    return float(np.mean([micro_f1(gold[t], pred[t], classes) for t in TOWERS]))


def predict_corpus(model: Hanso, encoded, batch_size: int = 64) -> dict[str, np.ndarray]:
    out = {t: [] for t in TOWERS}
    for i in range(0, len(encoded), batch_size):
        pred = model.predict_batch(make_batch(encoded[i : i + batch_size]))
        for t in TOWERS:
            out[t].append(pred[t])
    return {t: np.concatenate(v) for t, v in out.items()}


def evaluate_f1(model: Hanso, encoded) -> dict[str, float]:
    """Micro F1 per tower plus their mean (key ``mean``), eval mode."""
    pred = predict_corpus(model, encoded)
    gold = {t: np.array([d.labels[t] for d in encoded]) for t in TOWERS}
    classes = range(model.config.l_d)
    res = {t: micro_f1(gold[t], pred[t], classes) for t in TOWERS}
    res["mean"] = float(np.mean([res[t] for t in TOWERS]))
    return res


def train(
    encoded: Sequence,
    model_config: HansoConfig,
    train_config: TrainConfig,
    validation: Sequence | None = None,
    callback: Callable[[int, TrainHistory], None] | None = None,
) -> tuple[Hanso, TrainHistory]:
    """Train a fresh model on encoded documents.

    Each epoch is one seeded shuffle followed by mini-batches of
    ``batch_size`` documents (the last, smaller batch is kept). Each step
    clips the global gradient norm to ``g_max`` and applies Adam.

    ``train_f1`` in the history is computed from the dropout-active
    batch predictions made during the epoch; ``val_f1`` is an eval-mode pass.
    """
    if not encoded:
        raise ValueError("empty training corpus")
    tc = train_config
    model = Hanso(model_config, None)
    rng = np.random.default_rng([tc.seed, 1])
    drop_rng = np.random.default_rng([tc.seed, 2])
    state = AdamState()
    history = TrainHistory()
    n = len(encoded)
    bs = min(tc.batch_size, n)
    for epoch in range(tc.epochs):
        order = rng.permutation(n)
        total, norms = 0.0, []
        gold = {t: [] for t in TOWERS}
        pred = {t: [] for t in TOWERS}
        for start in range(0, n, bs):
            docs = [encoded[i] for i in order[start : start + bs]]
            batch = make_batch(docs)
            loss, grads, out = model.loss_and_grads(batch, train=True, rng=drop_rng)
            if not np.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at epoch {epoch + 1}")
            norms.append(global_norm(grads))
            grads = clip_grad_norm(grads, tc.g_max)
            adam_step(model.params, grads, state, tc.learning_rate, tc.beta1, tc.beta2, tc.eps)
            total += loss * len(docs)
            for t in TOWERS:
                gold[t].append(batch.doc_labels[t])
                pred[t].append(np.argmax(out[t].doc_logits, axis=1))
        history.loss.append(total / n)
        history.grad_norm.append(float(np.mean(norms)))
        history.train_f1.append(
            _mean_micro_f1(
                {t: np.concatenate(gold[t]) for t in TOWERS},
                {t: np.concatenate(pred[t]) for t in TOWERS},
                model_config.l_d,
            )
        )
        if validation:
            history.val_f1.append(evaluate_f1(model, validation)["mean"])
        if callback is not None:
            callback(epoch, history)
        log.debug("epoch %d loss %.4f", epoch + 1, history.loss[-1])
    return model, history


def fold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffle ``range(n)`` with ``seed`` and cut it into ``k`` contiguous folds."""
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    order = np.random.default_rng([seed, 3]).permutation(n)
    return [np.sort(f) for f in np.array_split(order, k)]


@dataclass
class CVResult:
    scores: dict[str, list[float]]

    @property
    def mean(self) -> dict[str, float]:
        return {k: float(np.mean(v)) for k, v in self.scores.items()}

    @property
    def std(self) -> dict[str, float]:
        return {k: float(np.std(v, ddof=1)) if len(v) > 1 else 0.0 for k, v in self.scores.items()}


def cross_validate(
    encoded: Sequence,
    configs: dict[str, tuple[HansoConfig, TrainConfig]],
    k: int = 3,
    seed: int = 0,
    fit: Callable | None = None,
) -> CVResult:
    """Mean validation micro-F1 per named configuration over ``k`` folds.

    ``fit(train_docs, model_config, train_config)`` must return a model with
    ``predict_batch``; defaults to :func:`train`.
    """
    fit = fit or (lambda docs, mc, tc: train(docs, mc, tc)[0])
    folds = fold_indices(len(encoded), k, seed)
    scores = {}
    for name, (mc, tc) in configs.items():
        scores[name] = []
        for i, val_idx in enumerate(folds):
            train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
            model = fit([encoded[j] for j in train_idx], mc, tc)
            scores[name].append(evaluate_f1(model, [encoded[j] for j in val_idx])["mean"])
    return CVResult(scores)

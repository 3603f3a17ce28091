"""Hierarchical attention network with sentence objectives (HANSO).

Shapes used throughout (row-vector convention, ``y = x @ W.T + b``)::

    N  real sentences packed across the batch
    T  padded tokens per sentence
    B  documents, J padded sentences per document
    E  embedding width, H = l_h // 2 units per LSTM direction

Frozen token embeddings feed a shared bi-LSTM followed by layer norm. Each
of the two towers (``infiltrates``, ``extraparenchymal``) then has

* word attention: ``u = tanh(W_u h + b_u)``, ``alpha_u = softmax(u . z_u)``,
  ``s = sum alpha_u h`` (the unprojected LSTM states are summed);
* three binary sentence heads (full variant): ``psi = W_psi tanh(W_v s + b_v) + b_psi``;
* sentence attention with logits ``tanh(W_a s + b_a) . z_s`` and document
  vector ``d = sum alpha_s x`` where ``x = tanh(W_x s + b_x)``;
* document scores ``phi = W_d d + b_d``.

Every layer has an explicit forward/backward pair; gradients never flow into
the embeddings.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from .annotation import LABEL_CLASSES, LabelClass
from .labelmap import targets_for_tower

TOWERS = ("infiltrates", "extraparenchymal")
N_TASKS = 3
LN_EPS = 1e-5


@dataclass(frozen=True)
class HansoConfig:
    l_h: int = 100
    l_p: int = 100
    l_d: int = 4
    max_sentences: int = 35
    max_tokens: int = 30
    embed_dim: int = 768
    variant: str = "full"
    dropout: float = 0.2
    seed: int = 0
    tied_sentence_projection: bool = False

    def __post_init__(self):
        if self.l_h % 2:
            raise ValueError("l_h must be even (split across the two LSTM directions)")
        for name in ("l_h", "l_p", "l_d", "max_sentences", "max_tokens", "embed_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.variant not in ("lite", "full"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def full(self) -> bool:
        return self.variant == "full"


# --------------------------------------------------------------------------
# parameters


def param_shapes(config: HansoConfig) -> dict[str, tuple[int, ...]]:
    E, H, lh, lp, ld = config.embed_dim, config.l_h // 2, config.l_h, config.l_p, config.l_d
    shapes: dict[str, tuple[int, ...]] = {}
    for d in ("fwd", "bwd"):
        shapes[f"lstm.{d}.W_x"] = (E, 4 * H)
        shapes[f"lstm.{d}.W_h"] = (H, 4 * H)
        shapes[f"lstm.{d}.b"] = (4 * H,)
    shapes["ln.gain"] = (lh,)
    shapes["ln.bias"] = (lh,)
    for t in TOWERS:
        shapes[f"{t}.W_u"] = (lp, lh)
        shapes[f"{t}.b_u"] = (lp,)
        shapes[f"{t}.z_u"] = (lp,)
        if config.full:
            for r in range(N_TASKS):
                shapes[f"{t}.task{r}.W_v"] = (lp, lh)
                shapes[f"{t}.task{r}.b_v"] = (lp,)
                shapes[f"{t}.task{r}.W_psi"] = (2, lp)
                shapes[f"{t}.task{r}.b_psi"] = (2,)
        if not config.tied_sentence_projection:
            shapes[f"{t}.W_a"] = (lp, lh)
            shapes[f"{t}.b_a"] = (lp,)
        shapes[f"{t}.z_s"] = (lp,)
        shapes[f"{t}.W_x"] = (lp, lh)
        shapes[f"{t}.b_x"] = (lp,)
        shapes[f"{t}.W_d"] = (ld, lp)
        shapes[f"{t}.b_d"] = (ld,)
    return shapes


def init_params(config: HansoConfig, seed: int | None = None) -> dict[str, np.ndarray]:
    """Glorot-uniform weights and context vectors, zero biases, forget bias 1.

    Each tensor draws from its own stream keyed by (seed, name), so a tensor's
    initial value does not depend on which other tensors exist.
    """
    seed = config.seed if seed is None else seed
    params = {}
    for name, shape in param_shapes(config).items():
        leaf = name.rsplit(".", 1)[1]
        if leaf == "gain":
            value = np.ones(shape)
        elif leaf.startswith("b") or leaf == "bias":
            value = np.zeros(shape)
            if name.startswith("lstm.") and leaf == "b":
                H = shape[0] // 4
                value[H : 2 * H] = 1.0
        else:
            fan_in, fan_out = (shape[0], 1) if len(shape) == 1 else (shape[0], shape[1])
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            rng = np.random.default_rng([seed, zlib.crc32(name.encode())])
            value = rng.uniform(-limit, limit, size=shape)
        params[name] = value.astype(np.float64)
    return params


# --------------------------------------------------------------------------
# batching


@dataclass
class Batch:
    """Packed sentences of several documents.

    ``x`` holds the embeddings of the N real sentences, ``tok_mask`` marks real
    tokens (always a prefix of each row). ``sent_doc``/``sent_slot`` place each
    packed sentence at ``[doc, slot]`` of the (B, J) document grid.
    """

    x: np.ndarray
    tok_mask: np.ndarray
    sent_doc: np.ndarray
    sent_slot: np.ndarray
    sent_mask: np.ndarray
    doc_labels: dict[str, np.ndarray] = field(default_factory=dict)
    sent_flags: np.ndarray | None = None

    @property
    def n_docs(self) -> int:
        return self.sent_mask.shape[0]


def make_batch(
    docs,
    pad_tokens: int | None = None,
    pad_sentences: int | None = None,
) -> Batch:
    """Collate encoded documents (see :mod:`hanso.data`) into a :class:`Batch`.

    ``docs`` items need ``sentences`` (list of (T_j, E) arrays) and optionally
    ``labels`` (dict head -> class index) and ``flags`` ((J, 6) array).
    """
    sents = [s for d in docs for s in d.sentences]
    if not sents:
        raise ValueError("batch has no sentences")
    if any(len(d.sentences) == 0 for d in docs):
        raise ValueError("empty document in batch")
    E = sents[0].shape[1]
    T = max(s.shape[0] for s in sents)
    if pad_tokens is not None:
        T = max(T, pad_tokens)
    J = max(len(d.sentences) for d in docs)
    if pad_sentences is not None:
        J = max(J, pad_sentences)
    N, B = len(sents), len(docs)
    x = np.zeros((N, T, E))
    tok_mask = np.zeros((N, T))
    sent_doc = np.zeros(N, dtype=np.int64)
    sent_slot = np.zeros(N, dtype=np.int64)
    sent_mask = np.zeros((B, J), dtype=bool)
    n = 0
    for b, d in enumerate(docs):
        for j, s in enumerate(d.sentences):
            if s.shape[0] == 0:
                raise ValueError("sentence with no tokens")
            x[n, : s.shape[0]] = s
            tok_mask[n, : s.shape[0]] = 1.0
            sent_doc[n], sent_slot[n] = b, j
            sent_mask[b, j] = True
            n += 1
    batch = Batch(x, tok_mask, sent_doc, sent_slot, sent_mask)
    if all(getattr(d, "labels", None) is not None for d in docs):
        batch.doc_labels = {h: np.array([d.labels[h] for d in docs], dtype=np.int64) for h in TOWERS}
    if all(getattr(d, "flags", None) is not None for d in docs):
        batch.sent_flags = np.concatenate([np.asarray(d.flags) for d in docs], axis=0).astype(np.int64)
    return batch


# --------------------------------------------------------------------------
# layers


def _sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def lstm_forward(x, mask, W_x, W_h, b, reverse=False):
    """One LSTM direction over padded sequences.

    Gates are packed as (input, forget, cell, output). Padded steps leave the
    state untouched and emit zeros, so the reverse direction starts at each
    sequence's last real token with a zero state.

    Args:
        x: (N, T, E) inputs.
        mask: (N, T) 1 for real tokens.

    Returns:
        out: (N, T, H) hidden states (zero at padded steps).
        cache: values needed by :func:`lstm_backward`.
    """
    N, T, _ = x.shape
    H = W_h.shape[0]
    proj = x @ W_x + b
    h = np.zeros((N, H))
    c = np.zeros((N, H))
    out = np.zeros((N, T, H))
    steps = []
    order = range(T - 1, -1, -1) if reverse else range(T)
    for t in order:
        m = mask[:, t : t + 1]
        a = proj[:, t] + h @ W_h
        i = _sigmoid(a[:, :H])
        f = _sigmoid(a[:, H : 2 * H])
        g = np.tanh(a[:, 2 * H : 3 * H])
        o = _sigmoid(a[:, 3 * H :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        steps.append((t, m, i, f, g, o, c, tc, h))
        out[:, t] = m * h_new
        c = m * c_new + (1.0 - m) * c
        h = m * h_new + (1.0 - m) * h
    return out, (x, W_h, steps)


def lstm_backward(dout, cache):
    """Gradients of one LSTM direction; returns ``(dW_x, dW_h, db)``."""
    x, W_h, steps = cache
    N, T, E = x.shape
    H = W_h.shape[0]
    dproj = np.zeros((N, T, 4 * H))
    dW_h = np.zeros_like(W_h)
    dh = np.zeros((N, H))
    dc = np.zeros((N, H))
    for t, m, i, f, g, o, c_prev, tc, h_prev in reversed(steps):
        dh_new = m * (dout[:, t] + dh)
        dc_new = m * dc + dh_new * o * (1.0 - tc * tc)
        da = np.concatenate(
            [
                dc_new * g * i * (1.0 - i),
                dc_new * c_prev * f * (1.0 - f),
                dc_new * i * (1.0 - g * g),
                dh_new * tc * o * (1.0 - o),
            ],
            axis=1,
        )
        dproj[:, t] = da
        dW_h += h_prev.T @ da
        dh = da @ W_h.T + (1.0 - m) * dh
        dc = dc_new * f + (1.0 - m) * dc
    flat = dproj.reshape(N * T, 4 * H)
    dW_x = x.reshape(N * T, E).T @ flat
    db = flat.sum(axis=0)
    return dW_x, dW_h, db


def layer_norm_forward(x, gain, bias):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv
    return gain * xhat + bias, (xhat, inv, gain)


def layer_norm_backward(dy, cache):
    xhat, inv, gain = cache
    axes = tuple(range(dy.ndim - 1))
    dgain = (dy * xhat).sum(axis=axes)
    dbias = dy.sum(axis=axes)
    dxhat = dy * gain
    dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True) - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
    return dx, dgain, dbias


def bilstm_forward(x, mask, params):
    """Shared bi-LSTM with layer norm over the concatenated states.

    Returns (N, T, l_h) states ``[forward ; backward]`` after layer norm.
    """
    hf, cf = lstm_forward(x, mask, params["lstm.fwd.W_x"], params["lstm.fwd.W_h"], params["lstm.fwd.b"])
    hb, cb = lstm_forward(
        x, mask, params["lstm.bwd.W_x"], params["lstm.bwd.W_h"], params["lstm.bwd.b"], reverse=True
    )
    hcat = np.concatenate([hf, hb], axis=-1)
    y, cln = layer_norm_forward(hcat, params["ln.gain"], params["ln.bias"])
    return y, (cf, cb, cln)


def bilstm_backward(dy, cache, grads):
    cf, cb, cln = cache
    dcat, grads["ln.gain"], grads["ln.bias"] = layer_norm_backward(dy, cln)
    H = dcat.shape[-1] // 2
    for name, c, d in (("fwd", cf, dcat[..., :H]), ("bwd", cb, dcat[..., H:])):
        gx, gh, gb = lstm_backward(d, c)
        grads[f"lstm.{name}.W_x"], grads[f"lstm.{name}.W_h"], grads[f"lstm.{name}.b"] = gx, gh, gb


def masked_softmax(e, mask):
    if not np.all(mask.any(axis=-1)):
        raise ValueError("attention over a fully masked row")
    e = np.where(mask, e, -np.inf)
    e = e - e.max(axis=-1, keepdims=True)
    w = np.exp(e)
    return w / w.sum(axis=-1, keepdims=True)


def _softmax_backward(dalpha, alpha):
    return alpha * (dalpha - (dalpha * alpha).sum(axis=-1, keepdims=True))


def dense_tanh(x, W, b):
    return np.tanh(x @ W.T + b)


def dense_tanh_backward(dy, y, x, W):
    dpre = dy * (1.0 - y * y)
    lead = dpre.reshape(-1, dpre.shape[-1])
    dW = lead.T @ x.reshape(-1, x.shape[-1])
    db = lead.sum(axis=0)
    dx = dpre @ W
    return dx, dW, db


def word_attention(h, W_u, b_u, z_u, mask=None):
    """Attention-pooled sentence vectors.

    Args:
        h: (N, T, l_h) token states, or (T, l_h) for one sentence.
        mask: (N, T) real-token mask; all ones when omitted.

    Returns:
        s: (N, l_h) weighted sums of the unprojected ``h``.
        alpha: (N, T) attention weights.
    """
    single = h.ndim == 2
    if single:
        h = h[None]
        mask = None if mask is None else np.asarray(mask)[None]
    if mask is None:
        mask = np.ones(h.shape[:2])
    u = dense_tanh(h, W_u, b_u)
    alpha = masked_softmax(u @ z_u, mask > 0)
    s = np.einsum("nt,ntd->nd", alpha, h)
    if single:
        return s[0], alpha[0]
    return s, alpha


def sentence_task_head(s, W_v, b_v, W_psi, b_psi):
    """Two-class scores ``W_psi tanh(W_v s + b_v) + b_psi``."""
    return dense_tanh(s, W_v, b_v) @ W_psi.T + b_psi


def doc_encode(s, W_a, b_a, z_s, W_x, b_x, mask=None):
    """Attention-pooled document vector over projected sentence vectors.

    Args:
        s: (J, l_h) sentence vectors of one document, or (B, J, l_h).

    Returns:
        d: (l_p,) or (B, l_p) document vectors.
        alpha: sentence attention weights.
    """
    single = s.ndim == 2
    if single:
        s = s[None]
        mask = None if mask is None else np.asarray(mask)[None]
    if mask is None:
        mask = np.ones(s.shape[:2], dtype=bool)
    x = dense_tanh(s, W_x, b_x)
    a = x if W_a is None else dense_tanh(s, W_a, b_a)
    alpha = masked_softmax(a @ z_s, mask)
    d = np.einsum("bj,bjp->bp", alpha, x)
    if single:
        return d[0], alpha[0]
    return d, alpha


def _log_softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def cross_entropy(logits, targets):
    """Summed cross-entropy and its gradient w.r.t. the logits."""
    logp = _log_softmax(logits)
    idx = np.arange(logits.shape[0])
    loss = -logp[idx, targets].sum()
    grad = np.exp(logp)
    grad[idx, targets] -= 1.0
    return loss, grad


def predict(logits) -> LabelClass:
    """Argmax over (none, present, unilateral, bilateral); ties go to the lowest."""
    return LABEL_CLASSES[int(np.argmax(np.asarray(logits)))]


def softmax(z):
    return np.exp(_log_softmax(np.asarray(z, dtype=np.float64)))


# --------------------------------------------------------------------------
# the network


@dataclass
class TowerOutput:
    doc_logits: np.ndarray  # (B, l_d)
    alpha_u: np.ndarray  # (N, T)
    alpha_s: np.ndarray  # (B, J)
    task_logits: np.ndarray | None = None  # (N, 3, 2)


@dataclass
class ForwardOutput:
    towers: dict[str, TowerOutput]
    batch: Batch

    def __getitem__(self, tower: str) -> TowerOutput:
        return self.towers[tower]

    def task_logits_grid(self, tower: str) -> np.ndarray:
        """Sentence task scores on the (B, J, 3, 2) document grid (zeros at pads)."""
        tl = self.towers[tower].task_logits
        B, J = self.batch.sent_mask.shape
        grid = np.zeros((B, J) + tl.shape[1:])
        grid[self.batch.sent_doc, self.batch.sent_slot] = tl
        return grid


def _dropout(x, p, rng):
    if p <= 0.0 or rng is None:
        return x, None
    keep = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * keep, keep


class Hanso:
    """Parameter container plus forward, loss and backward passes."""

    def __init__(self, config: HansoConfig, params: dict[str, np.ndarray] | None = None):
        self.config = config
        self.params = init_params(config) if params is None else params
        expected = param_shapes(config)
        if set(self.params) != set(expected):
            raise ValueError("parameter names do not match the configuration")
        for k, shp in expected.items():
            if self.params[k].shape != shp:
                raise ValueError(f"{k}: shape {self.params[k].shape} != {shp}")

    def forward(self, batch: Batch, train: bool = False, rng: np.random.Generator | None = None):
        """Run the network; returns ``(ForwardOutput, cache)``.

        Dropout is active only when ``train`` is true and ``rng`` is given.
        """
        P, cfg = self.params, self.config
        p_drop = cfg.dropout if train else 0.0
        rng = rng if train else None
        tmask = batch.tok_mask
        h, c_lstm = bilstm_forward(batch.x, tmask, P)
        h_d, keep_h = _dropout(h, p_drop, rng)
        B, J = batch.sent_mask.shape

        towers, tcache = {}, {}
        for t in TOWERS:
            u = dense_tanh(h_d, P[f"{t}.W_u"], P[f"{t}.b_u"])
            alpha_u = masked_softmax(u @ P[f"{t}.z_u"], tmask > 0)
            s = np.einsum("nt,ntd->nd", alpha_u, h_d)

            task_logits, task_cache = None, []
            if cfg.full:
                task_logits = np.zeros((s.shape[0], N_TASKS, 2))
                for r in range(N_TASKS):
                    v = dense_tanh(s, P[f"{t}.task{r}.W_v"], P[f"{t}.task{r}.b_v"])
                    v_d, keep_v = _dropout(v, p_drop, rng)
                    task_logits[:, r] = v_d @ P[f"{t}.task{r}.W_psi"].T + P[f"{t}.task{r}.b_psi"]
                    task_cache.append((v, v_d, keep_v))

            x = dense_tanh(s, P[f"{t}.W_x"], P[f"{t}.b_x"])
            a = x if cfg.tied_sentence_projection else dense_tanh(s, P[f"{t}.W_a"], P[f"{t}.b_a"])
            x_d, keep_x = _dropout(x, p_drop, rng)
            e_grid = np.zeros((B, J))
            e_grid[batch.sent_doc, batch.sent_slot] = a @ P[f"{t}.z_s"]
            alpha_s = masked_softmax(e_grid, batch.sent_mask)
            x_grid = np.zeros((B, J, x.shape[1]))
            x_grid[batch.sent_doc, batch.sent_slot] = x_d
            d = np.einsum("bj,bjp->bp", alpha_s, x_grid)
            phi = d @ P[f"{t}.W_d"].T + P[f"{t}.b_d"]

            towers[t] = TowerOutput(phi, alpha_u, alpha_s, task_logits)
            tcache[t] = (u, s, task_cache, x, a, x_d, keep_x, x_grid, d)
        return ForwardOutput(towers, batch), (h, h_d, keep_h, c_lstm, tcache)

    def loss_terms(self, out: ForwardOutput, batch: Batch) -> dict[str, float]:
        """Per-term summed losses (before the mean over documents)."""
        terms = {}
        for t in TOWERS:
            terms[f"{t}.doc"] = cross_entropy(out[t].doc_logits, batch.doc_labels[t])[0]
            if self.config.full:
                for r in range(N_TASKS):
                    flags = _tower_flags(batch, t)[:, r]
                    terms[f"{t}.task{r}"] = cross_entropy(out[t].task_logits[:, r], flags)[0]
        return terms

    def loss(self, out: ForwardOutput, batch: Batch, terms=None) -> float:
        """Mean over documents of each document's summed loss.

        ``terms`` restricts the sum to the named entries of :meth:`loss_terms`.
        """
        values = self.loss_terms(out, batch)
        return sum(v for k, v in values.items() if terms is None or k in terms) / batch.n_docs

    def backward(self, out: ForwardOutput, cache, batch: Batch, terms=None) -> dict[str, np.ndarray]:
        """Gradients of :meth:`loss` (with the same ``terms``) for every parameter."""
        P, cfg = self.params, self.config
        h, h_d, keep_h, c_lstm, tcache = cache
        scale = 1.0 / batch.n_docs

        def weight(name):
            return scale if terms is None or name in terms else 0.0

        grads: dict[str, np.ndarray] = {}
        dh_d = np.zeros_like(h_d)
        for t in TOWERS:
            u, s, task_cache, x, a, x_d, keep_x, x_grid, d = tcache[t]
            to = out[t]
            _, dphi = cross_entropy(to.doc_logits, batch.doc_labels[t])
            dphi *= weight(f"{t}.doc")
            grads[f"{t}.W_d"] = dphi.T @ d
            grads[f"{t}.b_d"] = dphi.sum(axis=0)
            dd = dphi @ P[f"{t}.W_d"]

            # document attention
            dalpha_s = np.einsum("bp,bjp->bj", dd, x_grid)
            dx_grid = to.alpha_s[..., None] * dd[:, None, :]
            de_grid = _softmax_backward(dalpha_s, to.alpha_s)
            dx_d = dx_grid[batch.sent_doc, batch.sent_slot]
            de_s = de_grid[batch.sent_doc, batch.sent_slot]
            dx = dx_d if keep_x is None else dx_d * keep_x
            grads[f"{t}.z_s"] = a.T @ de_s
            da = de_s[:, None] * P[f"{t}.z_s"][None, :]
            if cfg.tied_sentence_projection:
                dx = dx + da
                ds = np.zeros_like(s)
            else:
                ds, grads[f"{t}.W_a"], grads[f"{t}.b_a"] = dense_tanh_backward(da, a, s, P[f"{t}.W_a"])
            ds_x, grads[f"{t}.W_x"], grads[f"{t}.b_x"] = dense_tanh_backward(dx, x, s, P[f"{t}.W_x"])
            ds = ds + ds_x

            # sentence objectives
            if cfg.full:
                flags = _tower_flags(batch, t)
                for r in range(N_TASKS):
                    v, v_d, keep_v = task_cache[r]
                    _, dpsi = cross_entropy(to.task_logits[:, r], flags[:, r])
                    dpsi *= weight(f"{t}.task{r}")
                    grads[f"{t}.task{r}.W_psi"] = dpsi.T @ v_d
                    grads[f"{t}.task{r}.b_psi"] = dpsi.sum(axis=0)
                    dv = dpsi @ P[f"{t}.task{r}.W_psi"]
                    if keep_v is not None:
                        dv = dv * keep_v
                    ds_r, grads[f"{t}.task{r}.W_v"], grads[f"{t}.task{r}.b_v"] = dense_tanh_backward(
                        dv, v, s, P[f"{t}.task{r}.W_v"]
                    )
                    ds = ds + ds_r

            # word attention
            alpha_u = to.alpha_u
            dalpha_u = np.einsum("nd,ntd->nt", ds, h_d)
            dh_d += alpha_u[..., None] * ds[:, None, :]
            de_u = _softmax_backward(dalpha_u, alpha_u)
            grads[f"{t}.z_u"] = np.einsum("nt,ntp->p", de_u, u)
            du = de_u[..., None] * P[f"{t}.z_u"]
            dh_u, grads[f"{t}.W_u"], grads[f"{t}.b_u"] = dense_tanh_backward(du, u, h_d, P[f"{t}.W_u"])
            dh_d += dh_u

        dh = dh_d if keep_h is None else dh_d * keep_h
        bilstm_backward(dh, c_lstm, grads)
        return grads

    def loss_and_grads(self, batch: Batch, train: bool = False, rng: np.random.Generator | None = None):
        out, cache = self.forward(batch, train=train, rng=rng)
        return self.loss(out, batch), self.backward(out, cache, batch), out

    def predict_batch(self, batch: Batch) -> dict[str, np.ndarray]:
        """Class indices per tower in eval mode."""
        out, _ = self.forward(batch)
        return {t: np.argmax(out[t].doc_logits, axis=1) for t in TOWERS}


def _tower_flags(batch: Batch, tower: str) -> np.ndarray:
    if batch.sent_flags is None:
        raise ValueError("full variant needs sentence targets in the batch")
    return targets_for_tower(batch.sent_flags, tower)


def with_variant(config: HansoConfig, variant: str) -> HansoConfig:
    return replace(config, variant=variant)

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hanso.annotation import LabelClass
from hanso.embeddings import HashEmbedder
from hanso.model import (
    TOWERS,
    Hanso,
    HansoConfig,
    bilstm_forward,
    cross_entropy,
    doc_encode,
    init_params,
    make_batch,
    param_shapes,
    predict,
    sentence_task_head,
    word_attention,
)
from oracles import finite_difference, ref_attention_pool, ref_document

E = 5
SMALL = dict(l_h=6, l_p=4, embed_dim=E)


def toy_docs(rng, n_docs=2, max_sent=3, max_tok=4, l_d=4):
    docs = []
    for _ in range(n_docs):
        J = int(rng.integers(1, max_sent + 1))
        docs.append(
            SimpleNamespace(
                sentences=[rng.normal(size=(int(rng.integers(1, max_tok + 1)), E)) for _ in range(J)],
                labels={t: int(rng.integers(l_d)) for t in TOWERS},
                flags=rng.integers(0, 2, size=(J, 6)),
            )
        )
    return docs


def perturbed(cfg, seed=0, scale=0.3):
    m = Hanso(cfg)
    rng = np.random.default_rng(seed)
    for k in m.params:
        m.params[k] = m.params[k] + rng.normal(0, scale, m.params[k].shape)
    return m


def test_param_shapes_match_layout():
    shapes = param_shapes(HansoConfig())
    assert shapes["lstm.fwd.W_x"] == (768, 200)
    assert shapes["infiltrates.W_u"] == (100, 100)
    assert shapes["infiltrates.task2.W_psi"] == (2, 100)
    assert shapes["extraparenchymal.W_d"] == (4, 100)
    lite = param_shapes(HansoConfig(variant="lite"))
    assert not any(".task" in k for k in lite)
    assert set(lite) < set(shapes)
    assert "infiltrates.W_a" not in param_shapes(HansoConfig(tied_sentence_projection=True))


def test_init_conventions():
    cfg = HansoConfig(**SMALL)
    p = init_params(cfg)
    H = cfg.l_h // 2
    assert np.all(p["lstm.fwd.b"][H : 2 * H] == 1.0) and np.all(p["lstm.fwd.b"][:H] == 0.0)
    assert np.all(p["ln.gain"] == 1.0) and np.all(p["ln.bias"] == 0.0)
    lim = math.sqrt(6 / (4 + 6))
    assert np.all(np.abs(p["infiltrates.W_u"]) <= lim)
    again = init_params(cfg)
    assert all(np.array_equal(p[k], again[k]) for k in p)
    other = init_params(HansoConfig(**SMALL, seed=1))
    assert not np.array_equal(p["infiltrates.W_u"], other["infiltrates.W_u"])
    # shared tensors have the same init in both variants
    lite = init_params(HansoConfig(**SMALL, variant="lite"))
    assert all(np.array_equal(lite[k], p[k]) for k in lite)


def test_config_validation():
    with pytest.raises(ValueError):
        HansoConfig(l_h=5)
    with pytest.raises(ValueError):
        HansoConfig(variant="mid")
    with pytest.raises(ValueError):
        HansoConfig(l_p=0)


# --------------------------------------------------------------------------
# layers


def test_zero_lstm_gives_layer_norm_bias():
    cfg = HansoConfig(**SMALL)
    p = {k: np.zeros_like(v) for k, v in init_params(cfg).items()}
    p["ln.bias"] = np.arange(6.0)
    p["ln.gain"] = np.full(6, 3.0)
    x = np.random.default_rng(0).normal(size=(2, 3, E))
    y, _ = bilstm_forward(x, np.ones((2, 3)), p)
    np.testing.assert_array_equal(y, np.broadcast_to(np.arange(6.0), y.shape))


def test_single_token_sentence_matches_reference():
    cfg = HansoConfig(**SMALL)
    p = perturbed(cfg).params
    x = np.random.default_rng(1).normal(size=(1, 1, E))
    y, _ = bilstm_forward(x, np.ones((1, 1)), p)
    from oracles import ref_layer_norm, ref_lstm

    f = ref_lstm([x[0, 0]], p["lstm.fwd.W_x"], p["lstm.fwd.W_h"], p["lstm.fwd.b"])[0]
    b = ref_lstm([x[0, 0]], p["lstm.bwd.W_x"], p["lstm.bwd.W_h"], p["lstm.bwd.b"])[0]
    np.testing.assert_allclose(y[0, 0], ref_layer_norm(np.concatenate([f, b]), p["ln.gain"], p["ln.bias"]), atol=1e-13)


def test_word_attention_cases():
    rng = np.random.default_rng(2)
    W, b, z = rng.normal(size=(4, 6)), rng.normal(size=4), rng.normal(size=4)
    h1 = rng.normal(size=(1, 6))
    s, a = word_attention(h1, W, b, z)
    assert a.tolist() == [1.0]
    np.testing.assert_array_equal(s, h1[0])
    same = np.tile(rng.normal(size=6), (5, 1))
    _, a = word_attention(same, W, b, z)
    np.testing.assert_allclose(a, np.full(5, 0.2), atol=1e-15)
    h3 = rng.normal(size=(3, 6))
    s, a = word_attention(h3, W, b, z)
    s_ref, a_ref = ref_attention_pool(list(h3), list(h3), W, b, z)
    np.testing.assert_allclose(s, s_ref, atol=1e-14)
    np.testing.assert_allclose(a, a_ref, atol=1e-15)
    with pytest.raises(ValueError):
        word_attention(h3, W, b, z, mask=np.zeros(3))


def test_sentence_task_head():
    rng = np.random.default_rng(3)
    s = rng.normal(size=4)
    b_psi = np.array([0.3, -0.7])
    np.testing.assert_array_equal(
        sentence_task_head(s, np.zeros((3, 4)), np.zeros(3), np.zeros((2, 3)), b_psi), b_psi
    )
    # 2-dim hand example: v = tanh([0.5, -1]) and psi = W_psi v + b_psi
    W_v = np.array([[1.0, 0.0], [0.0, -1.0]])
    b_v = np.array([0.0, 0.0])
    W_psi = np.array([[2.0, 0.0], [1.0, 1.0]])
    psi = sentence_task_head(np.array([0.5, 1.0]), W_v, b_v, W_psi, np.array([1.0, 0.0]))
    t1, t2 = math.tanh(0.5), math.tanh(-1.0)
    np.testing.assert_allclose(psi, [2 * t1 + 1.0, t1 + t2], atol=1e-15)


def test_sentence_task_head_gradcheck():
    rng = np.random.default_rng(4)
    s, W_v, b_v = rng.normal(size=3), rng.normal(size=(4, 3)), rng.normal(size=4)
    W_psi, b_psi = rng.normal(size=(2, 4)), rng.normal(size=2)
    w = rng.normal(size=2)

    def f():
        return float(w @ sentence_task_head(s, W_v, b_v, W_psi, b_psi))

    v = np.tanh(W_v @ s + b_v)
    dpre = (W_psi.T @ w) * (1 - v * v)
    for arr, analytic in ((s, W_v.T @ dpre), (W_v, np.outer(dpre, s)), (b_v, dpre), (W_psi, np.outer(w, v)), (b_psi, w)):
        np.testing.assert_allclose(analytic, finite_difference(f, arr), rtol=1e-7, atol=1e-9)


def test_doc_encode_cases():
    rng = np.random.default_rng(5)
    W_a, b_a, z = rng.normal(size=(4, 6)), rng.normal(size=4), rng.normal(size=4)
    W_x, b_x = rng.normal(size=(4, 6)), rng.normal(size=4)
    s1 = rng.normal(size=(1, 6))
    d, a = doc_encode(s1, W_a, b_a, z, W_x, b_x)
    np.testing.assert_array_equal(d, np.tanh(W_x @ s1[0] + b_x))
    assert a.tolist() == [1.0]
    _, a = doc_encode(np.tile(s1, (4, 1)), W_a, b_a, z, W_x, b_x)
    np.testing.assert_allclose(a, 0.25, atol=1e-15)
    s3 = rng.normal(size=(3, 6))
    d, a = doc_encode(s3, W_a, b_a, z, W_x, b_x)
    xs = [np.tanh(W_x @ s + b_x) for s in s3]
    d_ref, a_ref = ref_attention_pool(xs, list(s3), W_a, b_a, z)
    np.testing.assert_allclose(d, d_ref, atol=1e-14)
    np.testing.assert_allclose(a, a_ref, atol=1e-15)


# --------------------------------------------------------------------------
# full network


@pytest.mark.parametrize("variant,tied", [("full", False), ("lite", False), ("full", True)])
def test_forward_matches_straight_line_reference(variant, tied):
    cfg = HansoConfig(**SMALL, variant=variant, tied_sentence_projection=tied)
    m = perturbed(cfg, seed=7)
    docs = toy_docs(np.random.default_rng(8), n_docs=3)
    out, _ = m.forward(make_batch(docs))
    for t in TOWERS:
        for b, doc in enumerate(docs):
            phi, task = ref_document(doc.sentences, m.params, t, tied=tied, full=cfg.full)
            np.testing.assert_allclose(out[t].doc_logits[b], phi, atol=1e-12)
            if cfg.full:
                grid = out.task_logits_grid(t)[b, : len(doc.sentences)]
                np.testing.assert_allclose(grid, task, atol=1e-12)
    if not cfg.full:
        assert out[TOWERS[0]].task_logits is None


@pytest.mark.parametrize("variant,tied", [("full", False), ("lite", False), ("full", True)])
def test_gradients_match_finite_differences(variant, tied):
    cfg = HansoConfig(**SMALL, variant=variant, dropout=0.3, tied_sentence_projection=tied)
    m = perturbed(cfg)
    batch = make_batch(toy_docs(np.random.default_rng(1), n_docs=2))

    def loss():
        out, _ = m.forward(batch, train=True, rng=np.random.default_rng(5))
        return m.loss(out, batch)

    out, cache = m.forward(batch, train=True, rng=np.random.default_rng(5))
    grads = m.backward(out, cache, batch)
    assert set(grads) == set(m.params)
    for k, p in m.params.items():
        num = finite_difference(loss, p, eps=1e-5)
        err = np.max(np.abs(grads[k] - num) / np.maximum(1.0, np.abs(grads[k])))
        assert err < 1e-4, k


def test_eval_deterministic_and_lite_full_agree():
    docs = toy_docs(np.random.default_rng(3), n_docs=4)
    batch = make_batch(docs)
    full = Hanso(HansoConfig(**SMALL, variant="full"))
    lite = Hanso(HansoConfig(**SMALL, variant="lite"))
    a, _ = full.forward(batch)
    b, _ = full.forward(batch)
    c, _ = lite.forward(batch)
    # dropout is ignored without train mode even when a generator is passed
    d, _ = full.forward(batch, train=False, rng=np.random.default_rng(0))
    for t in TOWERS:
        np.testing.assert_array_equal(a[t].doc_logits, b[t].doc_logits)
        np.testing.assert_array_equal(a[t].doc_logits, c[t].doc_logits)
        np.testing.assert_array_equal(a[t].doc_logits, d[t].doc_logits)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_attention_normalization_and_shapes(seed):
    rng = np.random.default_rng(seed)
    m = perturbed(HansoConfig(**SMALL), seed=seed % 97, scale=1.0)
    docs = toy_docs(rng, n_docs=3, max_sent=5, max_tok=6)
    batch = make_batch(docs)
    out, _ = m.forward(batch)
    for t in TOWERS:
        to = out[t]
        assert to.doc_logits.shape == (3, 4)
        np.testing.assert_allclose(to.alpha_u.sum(axis=1), 1.0, atol=1e-6)
        np.testing.assert_allclose(to.alpha_s.sum(axis=1), 1.0, atol=1e-6)
        assert np.all(to.alpha_u[batch.tok_mask == 0] == 0)
        assert np.all(to.alpha_s[~batch.sent_mask] == 0)
        for b, doc in enumerate(docs):
            assert out.task_logits_grid(t)[b, : len(doc.sentences)].shape == (len(doc.sentences), 3, 2)


def test_padding_invariance():
    m = perturbed(HansoConfig(**SMALL), seed=11)
    docs = toy_docs(np.random.default_rng(12), n_docs=3)
    plain, _ = m.forward(make_batch(docs))
    padded, _ = m.forward(make_batch(docs, pad_tokens=30, pad_sentences=35))
    alone = [m.forward(make_batch([d]))[0] for d in docs]
    for t in TOWERS:
        np.testing.assert_allclose(plain[t].doc_logits, padded[t].doc_logits, atol=1e-10, rtol=0)
        np.testing.assert_allclose(plain[t].task_logits, padded[t].task_logits, atol=1e-10, rtol=0)
        for b, o in enumerate(alone):
            np.testing.assert_allclose(plain[t].doc_logits[b], o[t].doc_logits[0], atol=1e-10, rtol=0)


def test_empty_document_rejected():
    d = SimpleNamespace(sentences=[], labels=None, flags=None)
    with pytest.raises(ValueError):
        make_batch([d])


# --------------------------------------------------------------------------
# loss


def test_cross_entropy_limits():
    loss, _ = cross_entropy(np.zeros((1, 4)), np.array([2]))
    assert loss == pytest.approx(math.log(4), abs=1e-15)
    loss, _ = cross_entropy(np.array([[0.0, 0.0, 80.0, 0.0]]), np.array([2]))
    assert loss < 1e-30


def test_uniform_logits_give_ln4_per_head():
    cfg = HansoConfig(**SMALL, variant="lite")
    m = Hanso(cfg)
    for t in TOWERS:
        m.params[f"{t}.W_d"][:] = 0.0
        m.params[f"{t}.b_d"][:] = 0.0
    batch = make_batch(toy_docs(np.random.default_rng(0), n_docs=3))
    out, _ = m.forward(batch)
    terms = m.loss_terms(out, batch)
    for t in TOWERS:
        assert terms[f"{t}.doc"] == pytest.approx(3 * math.log(4), rel=1e-14)
    assert m.loss(out, batch) == pytest.approx(2 * math.log(4), rel=1e-14)


def test_full_loss_decomposes_into_lite_plus_sentence_terms():
    docs = toy_docs(np.random.default_rng(9), n_docs=3)
    batch = make_batch(docs)
    full = perturbed(HansoConfig(**SMALL), seed=2)
    lite_params = {k: v for k, v in full.params.items() if ".task" not in k}
    lite = Hanso(HansoConfig(**SMALL, variant="lite"), lite_params)
    fo, _ = full.forward(batch)
    lo, _ = lite.forward(batch)
    sentence = 0.0
    for t in TOWERS:
        offset = 0 if t == "infiltrates" else 3
        for r in range(3):
            psi = fo[t].task_logits[:, r]
            y = batch.sent_flags[:, offset + r]
            logz = np.log(np.exp(psi).sum(axis=1))
            sentence += float(np.sum(logz - psi[np.arange(len(y)), y]))
    assert full.loss(fo, batch) == pytest.approx(lite.loss(lo, batch) + sentence / 3, rel=1e-13)


def test_gradient_linearity_and_masked_tower():
    m = perturbed(HansoConfig(**SMALL), seed=4)
    batch = make_batch(toy_docs(np.random.default_rng(4), n_docs=2))
    out, cache = m.forward(batch)
    names = list(m.loss_terms(out, batch))
    total = m.backward(out, cache, batch)
    parts = [m.backward(out, cache, batch, terms={n}) for n in names]
    for k in total:
        np.testing.assert_allclose(total[k], sum(p[k] for p in parts), atol=1e-13)
    only_inf = m.backward(out, cache, batch, terms={n for n in names if n.startswith("infiltrates")})
    for k, g in only_inf.items():
        if k.startswith("extraparenchymal."):
            assert not g.any(), k
    assert any(only_inf["lstm.fwd.W_x"].ravel())


def test_embeddings_frozen():
    emb = HashEmbedder(dim=E, seed=0)
    tokens = [["left", "opacities"], ["no", "effusion", "."]]
    before = [v.copy() for v in emb.embed(tokens)]
    doc = SimpleNamespace(
        sentences=emb.embed(tokens), labels={t: 1 for t in TOWERS}, flags=np.zeros((2, 6), dtype=int)
    )
    m = Hanso(HansoConfig(**SMALL))
    batch = make_batch([doc])
    _, grads, _ = m.loss_and_grads(batch)
    assert set(grads) == set(m.params)
    for k in m.params:
        m.params[k] -= 0.1 * grads[k]
    after = emb.embed(tokens)
    for a, b in zip(before, after):
        np.testing.assert_array_equal(a, b)


# --------------------------------------------------------------------------
# predict and embeddings


def test_predict_rules():
    assert predict([0, 0, 0, 9]) is LabelClass.BILATERAL
    assert predict([1, 1, 1, 1]) is LabelClass.NONE
    assert predict([0, 3, 3, 1]) is LabelClass.PRESENT
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = rng.normal(size=4)
        assert predict(z + 17.0) is predict(z)


def test_hash_embeddings():
    e = HashEmbedder(dim=16, seed=0)
    a, b = e.vector("opacities"), e.vector("effusion")
    np.testing.assert_array_equal(a, HashEmbedder(dim=16, seed=0).vector("opacities"))
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12
    assert a @ b < 1.0 - 1e-6
    assert not np.array_equal(a, HashEmbedder(dim=16, seed=1).vector("opacities"))
    out = e.embed([["x", "y", "x"]])
    np.testing.assert_array_equal(out[0][0], out[0][2])

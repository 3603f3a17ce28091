# %% [markdown]
# # Inside the network
#
# Frozen token vectors go through a shared bi-LSTM and layer norm. Each
# tower pools tokens into sentence vectors, optionally predicts the three
# sentence tasks, then pools sentences into a document vector.

# %%
import numpy as np

from hanso.corpusgen import GenConfig, generate
from hanso.data import encode_corpus
from hanso.embeddings import HashEmbedder
from hanso.model import Hanso, HansoConfig, make_batch, predict

config = HansoConfig(l_h=16, l_p=16, embed_dim=32)
docs = generate(GenConfig(n_docs=4, seed=2))
encoded = encode_corpus(docs, HashEmbedder(32), config)
model = Hanso(config)
batch = make_batch(encoded)
out, _ = model.forward(batch)

# %% [markdown]
# Attention weights are exposed for inspection and sum to one over the real
# tokens and sentences.

# %%
tower = out["infiltrates"]
print("document logits", tower.doc_logits.shape, "sentence task logits", tower.task_logits.shape)
print("sentence attention of doc 0:", np.round(tower.alpha_s[0][batch.sent_mask[0]], 3))
print("row sums:", tower.alpha_u.sum(axis=1)[:5], tower.alpha_s.sum(axis=1))
print("untrained prediction:", predict(tower.doc_logits[0]).value)

# %% [markdown]
# Gradients come from explicit backward passes. A central difference on one
# weight agrees with the analytic value.

# %%
loss, grads, _ = model.loss_and_grads(batch)
name, idx, eps = "infiltrates.W_x", (3, 5), 1e-5
w = model.params[name]
w[idx] += eps
up = model.loss(model.forward(batch)[0], batch)
w[idx] -= 2 * eps
down = model.loss(model.forward(batch)[0], batch)
w[idx] += eps
print(f"loss {loss:.4f}; d/dW analytic {grads[name][idx]:.8f}, numeric {(up - down) / (2 * eps):.8f}")

# %% [markdown]
# Padding a batch to the maximum shape leaves every output unchanged.

# %%
padded, _ = model.forward(make_batch(encoded, pad_tokens=30, pad_sentences=35))
print("max change after padding:", np.abs(padded["infiltrates"].doc_logits - tower.doc_logits).max())

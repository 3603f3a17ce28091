# %% [markdown]
# # Bilateral vs not bilateral
#
# For the binary task none/present/unilateral collapse to one class. A model
# with two document classes is trained, its bilateral probability is swept
# into an ROC curve, and Youden's J picks an operating threshold.

# %%
import dataclasses

import numpy as np

from hanso.corpusgen import GenConfig, generate
from hanso.data import encode_corpus
from hanso.embeddings import HashEmbedder
from hanso.evaluate import auc, roc_curve, youden_j
from hanso.model import HansoConfig, make_batch, softmax
from hanso.train import recipe, train

overrides, tc = recipe("full", epochs=15)
config = dataclasses.replace(HansoConfig(l_h=32, l_p=32, embed_dim=64, l_d=2), **overrides)
docs = generate(GenConfig(n_docs=200, seed=11))
encoded = encode_corpus(docs, HashEmbedder(64), config, binary=True)
model, _ = train(encoded[:150], config, tc)

# %%
test = encoded[150:]
out, _ = model.forward(make_batch(test))
scores = softmax(out["infiltrates"].doc_logits)[:, 1]
targets = [d.labels["infiltrates"] for d in test]
curve = roc_curve(scores, targets)
best = youden_j(curve)
print(f"AUC {auc(curve):.3f}; Youden J {best.j:.3f} at threshold {best.threshold:.3f} (fpr {best.fpr:.2f}, tpr {best.tpr:.2f})")

# %%
for p in curve[:: max(1, len(curve) // 8)]:
    print(f"{p.threshold:8.3f}  fpr {p.fpr:.2f}  tpr {p.tpr:.2f}")
print("accuracy at J threshold:", np.mean((scores >= best.threshold) == np.array(targets)))

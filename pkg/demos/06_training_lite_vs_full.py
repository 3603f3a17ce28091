# %% [markdown]
# # Training with and without sentence objectives
#
# The lite variant learns only from document labels. The full variant also
# receives the per-sentence relation targets. A short run on a synthetic
# corpus shows both training loops and the held-out comparison. Epoch counts
# are trimmed so the script finishes in a couple of minutes.

# %%
import dataclasses

from hanso.corpusgen import GenConfig, generate
from hanso.data import encode_corpus
from hanso.embeddings import HashEmbedder
from hanso.evaluate import mean_std_compare
from hanso.model import HansoConfig
from hanso.train import evaluate_f1, recipe, train

base = HansoConfig(l_h=32, l_p=32, embed_dim=64)
encoded = encode_corpus(generate(GenConfig(n_docs=160, seed=5)), HashEmbedder(64), base)
train_set, test_set = encoded[:128], encoded[128:]

# %%
scores = {"lite": [], "full": []}
for seed in range(3):
    for variant, epochs in (("lite", 40), ("full", 15)):
        overrides, tc = recipe(variant, seed=seed, epochs=epochs)
        model, history = train(train_set, dataclasses.replace(base, seed=seed, **overrides), tc)
        f1 = evaluate_f1(model, test_set)
        scores[variant].append(f1["mean"])
        print(f"seed {seed} {variant}: loss {history.loss[0]:.3f} -> {history.loss[-1]:.3f}, held-out micro-F1 {f1['mean']:.3f}")

# %%
res = mean_std_compare(scores["full"], scores["lite"])
print(f"full {res.mean_a:.3f} vs lite {res.mean_b:.3f}; Welch t = {res.t:.2f}, p = {res.p_two_sided:.3f}")

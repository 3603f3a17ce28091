# %% [markdown]
# # Synthetic reports
#
# The generator plants annotated clauses, so document labels and sentence
# flags are known exactly. Everything is a function of the seed.

# %%
import numpy as np

from hanso.annotation import LABEL_HEADS, serialize_standoff
from hanso.corpusgen import GenConfig, generate_with_truth

docs, truths = generate_with_truth(GenConfig(n_docs=500, seed=0))
print(docs[0].text)
print(serialize_standoff(docs[0])[1])

# %% [markdown]
# Class frequencies follow the configured distributions.

# %%
config = GenConfig()
for head in LABEL_HEADS:
    freqs = {c: np.mean([d.labels[head].value == c for d in docs]) for c in config.class_probs[head]}
    print(head, {c: f"{freqs[c]:.2f} (target {config.class_probs[head][c]:.2f})" for c in freqs})

# %% [markdown]
# Mean entity counts per report track the configured rates.

# %%
for etype, rate in config.entity_rates.items():
    print(f"{etype:9s} {np.mean([t.entity_counts[etype] for t in truths]):.2f} (target {rate})")

# %% [markdown]
# Pin a head to a single class and every report carries that label.

# %%
probs = GenConfig().class_probs
probs["infiltrates"] = {"none": 0.0, "present": 0.0, "unilateral": 0.0, "bilateral": 1.0}
only_bi, _ = generate_with_truth(GenConfig(n_docs=50, seed=1, class_probs=probs))
print({d.labels.infiltrates.value for d in only_bi})

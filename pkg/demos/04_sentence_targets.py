# %% [markdown]
# # Sentence targets from relations
#
# Each region-side or region-negation relation switches on one of six flags
# for the sentence holding the region. Size relations are dropped.

# %%
from hanso.corpusgen import GenConfig, generate_with_truth
from hanso.labelmap import SENTENCE_TASKS, relations_to_sentence_labels, targets_for_tower
from hanso.textproc import segment

docs, truths = generate_with_truth(GenConfig(n_docs=20, seed=3))
doc = max(docs, key=lambda d: len(d.relations))
sentences = segment(doc.text)
targets = relations_to_sentence_labels(doc, sentences)
print(" " * 8 + " ".join(f"{t.value:7s}" for t in SENTENCE_TASKS))
for s, row in zip(sentences, targets.flags):
    print(f"{s.index:6d}  " + " ".join(f"{v:7d}" for v in row), " ", doc.text[s.start : s.end][:60])

# %% [markdown]
# The infiltrates tower only sees the three parenchymal tasks.

# %%
print(targets_for_tower(targets, "infiltrates"))

# %% [markdown]
# The generator also recorded the flags while building each report; the two
# agree everywhere.

# %%
assert all((relations_to_sentence_labels(d).flags == t.sentence_flags).all() for d, t in zip(docs, truths))
print("flags match the generator's bookkeeping for", len(docs), "documents")

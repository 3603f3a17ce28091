# %% [markdown]
# # Annotator agreement
#
# Two annotators marked the same sentence. They agree that a left-sided
# parenchymal region is present but chose different span boundaries, and
# only one of them annotated the negated pneumothorax.

# %%
from pathlib import Path

from hanso.data import load_corpus
from hanso.scoring import prf, score_corpus

data = Path(__file__).resolve().parent.parent / "tests" / "data"
a = load_corpus(data / "agree_a")
b = load_corpus(data / "agree_b")
print(a[0].text.splitlines()[0])
for doc, who in ((a[0], "A"), (b[0], "B")):
    print(who, [(e.etype.value, e.text) for e in doc.entities])

# %% [markdown]
# Any-overlap counts spans: one shared token is enough. Partial match counts
# tokens, so annotator A's longer region span costs recall.

# %%
report = score_corpus(a, b)
key = ("region", "parenchymal")
print("any overlap:", report.any_overlap[key], prf(report.any_overlap[key]))
print("partial    :", report.partial[key], prf(report.partial[key]))

# %%
print(report.to_table())

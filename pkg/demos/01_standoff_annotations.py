# %% [markdown]
# # Standoff annotations
#
# A report lives in two files: the raw text (ending in the label marker line)
# and a standoff `.ann` file with entities, subtype/label attributes and
# `attr` relations. This walk-through parses a small report, inspects it,
# breaks it on purpose and writes it back out.

# %%
from pathlib import Path

from hanso.annotation import SchemaError, parse_standoff, serialize_standoff, validate

here = Path(__file__).resolve().parent
fixture = here.parent / "tests" / "data" / "golden"
txt = (fixture / "fixture.txt").read_text()
ann = (fixture / "fixture.ann").read_text()
print(txt)
print(ann)

# %% [markdown]
# Parsing resolves marker entities into document labels and keeps the rest
# as typed entities and relations.

# %%
doc = parse_standoff(txt, ann, doc_id="fixture")
for e in doc.entities:
    print(f"{e.id:4s} {e.etype.value:9s} {e.subtype:17s} [{e.span.start:3d},{e.span.end:3d})  {e.text!r}")
for r in doc.relations:
    head, tail = doc.entity_map()[r.head], doc.entity_map()[r.tail]
    print(f"{r.id}: {head.text!r} -> {tail.text!r}")
print("labels:", doc.labels.infiltrates.value, "/", doc.labels.extraparenchymal.value)

# %% [markdown]
# A relation pointing at an entity that does not exist is rejected with the
# rule that fired.

# %%
broken = ann.replace("Arg2:T1", "Arg2:T9")
try:
    parse_standoff(txt, broken)
except SchemaError as exc:
    for v in exc.violations:
        print(v.rule, v.item_id, v.detail)

# %% [markdown]
# Serialization is canonical, so a parse/serialize cycle is stable.

# %%
txt2, ann2 = serialize_standoff(doc)
assert parse_standoff(txt2, ann2, "fixture") == doc
assert validate(doc) == []
print(ann2)

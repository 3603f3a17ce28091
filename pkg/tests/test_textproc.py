import pytest
from hypothesis import given, strategies as st

from hanso.textproc import segment, sentence_of, split_sentences, tokenize


def texts(spans, text):
    return [text[s:e] for s, e in spans]


def test_line_breaks_end_sentences():
    text = "No effusion.\nClear lungs."
    assert texts(split_sentences(text), text) == ["No effusion.", "Clear lungs."]


def test_line_break_without_punctuation():
    text = "FINDINGS:\nLungs clear"
    assert texts(split_sentences(text), text) == ["FINDINGS:", "Lungs clear"]


def test_abbreviation_followed_by_capital_splits():
    # the rule as written: "." + space + uppercase is a boundary
    text = "Dr. Smith reviewed."
    assert texts(split_sentences(text), text) == ["Dr.", "Smith reviewed."]


def test_boundary_before_digit_but_not_lowercase():
    text = "Stable. 2 views obtained. and more"
    assert texts(split_sentences(text), text) == ["Stable.", "2 views obtained. and more"]


def test_empty_and_blank_lines():
    assert split_sentences("") == []
    assert split_sentences("\n\n  \n") == []
    text = "  A.  \n\n B. "
    assert texts(split_sentences(text), text) == ["A.", "B."]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("midlung, basilar opacities", ["midlung", ",", "basilar", "opacities"]),
        ("Pa02/FI02", ["Pa02", "/", "FI02"]),
        ("a  b", ["a", "b"]),
        ("<< INFILTRATES >>", ["<", "<", "INFILTRATES", ">", ">"]),
        ("ground-glass (mild) 50%", ["ground", "-", "glass", "(", "mild", ")", "50", "%"]),
        ("", []),
    ],
)
def test_tokenize(text, expected):
    assert [t.text for t in tokenize(text)] == expected


def test_annotator_pair_token_counts():
    gold = tokenize("midlung, basilar opacities")
    pred = tokenize("opacities")
    shared = {t.text for t in gold} & {t.text for t in pred}
    assert len(shared) == 1 and len(gold) - len(shared) == 3


def test_sentence_of():
    text = "One here.  Two starts here and\nthree."
    sents = segment(text)
    assert sentence_of(0, sents) == 0
    # inside the gap between sentence 0 and 1 -> next sentence
    assert sentence_of(text.index("  ") + 1, sents) == 1
    # start-anchored: a span starting in sentence 1 and ending in 2
    assert sentence_of(text.index("here and"), sents) == 1
    with pytest.raises(ValueError):
        sentence_of(len(text), sents, len(text))


def test_sentence_of_marker_line():
    from hanso.annotation import MARKER, append_marker

    text = append_marker("Clear.")
    sents = segment(text)
    assert sentence_of(text.index(MARKER) + 3, sents) == len(sents) - 1 == 1


_alphabet = st.sampled_from(list("abcXYZ019 .,!?\n/-()%:"))


@given(st.text(alphabet=_alphabet, max_size=80))
def test_sentences_cover_non_whitespace(text):
    sents = segment(text)
    covered = set()
    prev_end = -1
    for s in sents:
        assert s.start >= prev_end and s.start < s.end
        assert not text[s.start].isspace() and not text[s.end - 1].isspace()
        covered.update(range(s.start, s.end))
        prev_end = s.end
    assert all(text[i].isspace() for i in range(len(text)) if i not in covered)


@given(st.text(alphabet=_alphabet, max_size=80))
def test_tokens_reconstruct_sentence(text):
    for s in segment(text):
        rebuilt = ""
        pos = s.start
        for tok in s.tokens:
            gap = text[pos:tok.start]
            assert gap.strip() == ""
            rebuilt += gap + tok.text
            assert tok.text and not any(c.isspace() for c in tok.text)
            assert text[tok.start:tok.end] == tok.text
            pos = tok.end
        assert rebuilt == text[s.start:s.end]

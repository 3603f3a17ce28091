"""Rule-based sentence segmentation and tokenization.

Line breaks always end a sentence. Inside a line, a sentence ends after
``.``, ``!`` or ``?`` when the next non-space character is an uppercase
letter or a digit. Tokens are whitespace-delimited chunks with the
characters in :data:`PUNCTUATION` split off as single-character tokens.
No casing changes are made.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field

PUNCTUATION = frozenset(".,;:!?()[]/<>%-")

_TERMINALS = ".!?"


@dataclass(frozen=True)
class Token:
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class Sentence:
    index: int
    start: int
    end: int
    tokens: tuple[Token, ...] = field(default=(), compare=False)

    @property
    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def _strip_bounds(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def _line_boundaries(text: str, start: int, end: int) -> list[tuple[int, int]]:
    pieces = []
    cur = start
    i = start
    while i < end:
        if text[i] in _TERMINALS:
            j = i + 1
            while j < end and text[j] in " \t\r\f\v":
                j += 1
            if j > i + 1 and j < end and (text[j].isupper() or text[j].isdigit()):
                pieces.append((cur, i + 1))
                cur = j
                i = j
                continue
        i += 1
    pieces.append((cur, end))
    return pieces


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Return ``(start, end)`` character spans of the sentences in ``text``."""
    spans = []
    line_start = 0
    for line in text.split("\n"):
        line_end = line_start + len(line)
        for s, e in _line_boundaries(text, line_start, line_end):
            s, e = _strip_bounds(text, s, e)
            if s < e:
                spans.append((s, e))
        line_start = line_end + 1
    return spans


_CHUNK = re.compile(r"\S+")


def tokenize(text: str, offset: int = 0) -> list[Token]:
    """Split ``text`` into tokens; ``offset`` shifts the reported spans."""
    tokens = []
    for m in _CHUNK.finditer(text):
        chunk_start = m.start()
        buf_start = None
        for k, ch in enumerate(m.group()):
            pos = chunk_start + k
            if ch in PUNCTUATION:
                if buf_start is not None:
                    tokens.append(Token(buf_start + offset, pos + offset, text[buf_start:pos]))
                    buf_start = None
                tokens.append(Token(pos + offset, pos + 1 + offset, ch))
            elif buf_start is None:
                buf_start = pos
        if buf_start is not None:
            tokens.append(Token(buf_start + offset, m.end() + offset, text[buf_start:m.end()]))
    return tokens


def segment(text: str) -> list[Sentence]:
    """Split ``text`` into sentences with their tokens attached."""
    out = []
    for i, (s, e) in enumerate(split_sentences(text)):
        out.append(Sentence(i, s, e, tuple(tokenize(text[s:e], offset=s))))
    return out


def document_tokens(text: str) -> list[Token]:
    """All tokens of a document in order, via sentence segmentation."""
    return [tok for sent in segment(text) for tok in sent.tokens]


def sentence_of(start: int, sentences: list[Sentence], text_length: int | None = None) -> int:
    """Index of the sentence containing offset ``start``.

    An offset in the whitespace between two sentences resolves to the next
    one. Offsets past the last sentence raise ``ValueError``.
    """
    if start < 0 or (text_length is not None and start >= text_length):
        raise ValueError(f"offset {start} is outside the text")
    ends = [s.end for s in sentences]
    idx = bisect.bisect_right(ends, start)
    if idx >= len(sentences):
        raise ValueError(f"offset {start} is beyond the last sentence")
    return idx

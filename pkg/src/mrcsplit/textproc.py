"""Deterministic text processing shared by every downstream stage.

Tokenization, sentence segmentation, SQuAD-style answer normalization and
content-term extraction (lowercase, stopword drop, Porter stem). Everything
here is pure and rule-based; equal inputs give identical outputs on any
platform, which is what makes overlap counts and report numbers
reproducible.

Offsets are Unicode codepoint indices into the source string
(``text[start:end] == surface``).
"""

from __future__ import annotations

import functools
import hashlib
import re
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from .porter import stem

_WS_CHUNK = re.compile(r"\S+")
_ARTICLES = re.compile(r"\b(a|an|the)\b")

# Sentence terminators and the characters that may trail them before the
# whitespace gap (closing quotes/brackets, further terminators).
_TERMINATORS = ".?!"
_TRAILERS = ".?!\"')]}’”"
_OPEN_QUOTES = "\"'‘“"

# Words whose trailing period does not end a sentence. Single letters are
# deliberately absent ("A. B? C!" is three sentences).
_ABBREVIATIONS = frozenset(
    """
    mr. mrs. ms. dr. prof. rev. gen. rep. sen. gov. lt. col. capt. sgt.
    sr. jr. st. mt. ft. dept. univ. assn. bros. inc. ltd. co. corp.
    u.s. u.k. u.n. e.u. d.c. a.m. p.m. i.e. e.g. etc. vs. cf. al.
    no. vol. fig. ch. sec. pp. ed. eds. approx. est.
    jan. feb. mar. apr. jun. jul. aug. sep. sept. oct. nov. dec.
    """.split()
)


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class SentenceSpan:
    index: int
    start: int
    end: int
    tokens: tuple[Token, ...]
    token_offset: int  # index of tokens[0] in the full-text token list


def _is_punct(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[Token]:
    """Whitespace split, then peel leading/trailing punctuation into
    separate single-character tokens. Offsets reconstruct the text exactly."""
    tokens: list[Token] = []
    for chunk in _WS_CHUNK.finditer(text):
        left, right = chunk.start(), chunk.end()
        lead: list[Token] = []
        trail: list[Token] = []
        while left < right and _is_punct(text[left]):
            lead.append(Token(text[left], left, left + 1))
            left += 1
        while right > left and _is_punct(text[right - 1]):
            trail.append(Token(text[right - 1], right - 1, right))
            right -= 1
        tokens.extend(lead)
        if left < right:
            tokens.append(Token(text[left:right], left, right))
        tokens.extend(reversed(trail))
    return tokens


def _word_before(text: str, idx: int) -> str:
    """The whitespace-delimited word ending at text[idx] (inclusive)."""
    start = idx
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : idx + 1]


def _sentence_breaks(text: str) -> list[int]:
    breaks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j] in _TRAILERS:
                j += 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            if (
                k > j
                and k < n
                and (text[k].isupper() or text[k] in _OPEN_QUOTES)
                and _word_before(text, i).lower() not in _ABBREVIATIONS
            ):
                breaks.append(j)
                i = k
                continue
            i = j
        else:
            i += 1
    return breaks


def segment_sentences(text: str) -> list[SentenceSpan]:
    """Rule-based sentence split: terminator + whitespace + capital/quote,
    guarded by an abbreviation list. Text without a terminator is one
    sentence; all-whitespace text yields none. Sentence spans are trimmed
    to their non-whitespace extent and tile the token stream."""
    tokens = tokenize(text)
    edges = [0] + _sentence_breaks(text) + [len(text)]
    spans: list[SentenceSpan] = []
    tok_pos = 0
    for lo, hi in zip(edges, edges[1:]):
        start, end = lo, hi
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start == end:
            continue
        first = tok_pos
        while tok_pos < len(tokens) and tokens[tok_pos].start < end:
            tok_pos += 1
        spans.append(
            SentenceSpan(
                index=len(spans),
                start=start,
                end=end,
                tokens=tuple(tokens[first:tok_pos]),
                token_offset=first,
            )
        )
    return spans


@functools.lru_cache(maxsize=65536)
def cached_sentences(text: str) -> tuple[SentenceSpan, ...]:
    """Memoized segmentation; corpora reuse one paragraph across many
    questions, so per-context work should happen once."""
    return tuple(segment_sentences(text))


def normalize_answer(text: str) -> str:
    """SQuAD-style normalization: lowercase, strip punctuation characters,
    drop the articles a/an/the as whole words, collapse whitespace."""
    text = text.lower()
    text = "".join(ch for ch in text if not _is_punct(ch))
    text = _ARTICLES.sub(" ", text)
    return " ".join(text.split())


class StopwordList:
    """A versioned stopword list; its file hash goes into provenance headers."""

    def __init__(self, words, sha256: str, source: str):
        self.words = frozenset(words)
        self.sha256 = sha256
        self.source = source

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


def _parse_stopwords(raw: bytes, source: str) -> StopwordList:
    words = []
    for line in raw.decode("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return StopwordList(words, hashlib.sha256(raw).hexdigest(), source)


def load_stopwords(path=None) -> StopwordList:
    if path is None:
        raw = resources.files("mrcsplit.data").joinpath("stopwords.txt").read_bytes()
        return _parse_stopwords(raw, "builtin")
    with open(path, "rb") as fh:
        return _parse_stopwords(fh.read(), str(path))


_DEFAULT_STOPWORDS: StopwordList | None = None


def default_stopwords() -> StopwordList:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


def content_terms(tokens, stopwords: StopwordList | None = None) -> Counter:
    """Multiset of stemmed, lowercased, stopword-free terms.

    Tokens with no alphanumeric character (bare punctuation) are not words
    and are skipped. A stem that lands on a stopword (e.g. "willed" ->
    "will") is also dropped, so the bag never contains stopword entries.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    bag: Counter = Counter()
    for token in tokens:
        low = token.surface.lower()
        if not any(ch.isalnum() for ch in low):
            continue
        if low in stopwords:
            continue
        stemmed = stem(low)
        if stemmed in stopwords:
            continue
        bag[stemmed] += 1
    return bag

"""Granularity-aware text segmentation with source spans.

Each element records the content used for comparisons plus the span of the raw
region it came from, so slicing the parent by the span always reproduces the
raw text.  Content may differ from the raw slice where documented: paragraphs
are trimmed of surrounding whitespace, bullet items exclude their list marker,
and words shed leading/trailing punctuation.
"""

from __future__ import annotations

import functools
import re
import unicodedata
from dataclasses import dataclass
from typing import Callable, Sequence

from .rules import LANGUAGES, Level

_PARAGRAPH_BREAK = re.compile(r"\n{2,}")
_BULLET_MARKER = re.compile(r"^\s*(?:[*+-]|[0-9]+[.)])\s+")
_WORD_TOKEN = re.compile(r"\S+")
_EN_TERMINAL_RUN = re.compile(r"[.!?]+")
_ZH_TERMINAL_RUN = re.compile(r"[。！？…]+")

#: Tokens that suppress an English sentence split when they end at the
#: terminator run (matched against the whitespace-delimited token, verbatim).
EN_ABBREVIATIONS = frozenset(
    {"Mr.", "Mrs.", "Dr.", "Prof.", "St.", "e.g.", "i.e.", "etc.", "vs.", "Fig.", "Eq."}
)

_CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF))
_EXTRA_PUNCT = frozenset({"～"})  # fullwidth tilde has category Sm but reads as punctuation


@dataclass(frozen=True)
class Element:
    """One segment: comparison text plus the raw span in its parent."""

    text: str
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def is_cjk_char(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def is_ascii_letter(ch: str) -> bool:
    return "A" <= ch <= "Z" or "a" <= ch <= "z"


def is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") or ch in _EXTRA_PUNCT


@functools.lru_cache(maxsize=256)
def _compiled(pattern: str) -> re.Pattern[str]:
    return re.compile(pattern)


def _paragraphs(text: str) -> list[Element]:
    out: list[Element] = []
    prev = 0
    for m in _PARAGRAPH_BREAK.finditer(text):
        out.append(Element(text[prev : m.start()].strip(), prev, m.start()))
        prev = m.end()
    out.append(Element(text[prev:].strip(), prev, len(text)))
    return [el for el in out if el.text]


def _line_regions(text: str) -> list[tuple[int, int]]:
    regions = []
    start = 0
    while start <= len(text):
        nl = text.find("\n", start)
        end = len(text) if nl < 0 else nl
        regions.append((start, end))
        if nl < 0:
            break
        start = nl + 1
    return regions


def _lines(text: str) -> list[Element]:
    out = []
    for a, b in _line_regions(text):
        raw = text[a:b]
        if raw.strip():
            out.append(Element(raw, a, b))
    return out


def _bullets(text: str) -> list[Element]:
    out = []
    for a, b in _line_regions(text):
        raw = text[a:b]
        m = _BULLET_MARKER.match(raw)
        if m:
            out.append(Element(raw[m.end() :], a, b))
    return out


def _sentences(text: str, run_re: re.Pattern[str], require_trailing_space: bool) -> list[Element]:
    boundaries: list[int] = []
    for m in run_re.finditer(text):
        if require_trailing_space:
            if m.end() < len(text) and not text[m.end()].isspace():
                continue
            token_start = m.start()
            while token_start > 0 and not text[token_start - 1].isspace():
                token_start -= 1
            if text[token_start : m.end()] in EN_ABBREVIATIONS:
                continue
        boundaries.append(m.end())
    out: list[Element] = []
    start = _skip_space(text, 0)
    for b in boundaries:
        if start < b:
            out.append(Element(text[start:b], start, b))
        start = _skip_space(text, b)
    end = len(text)
    while end > start and text[end - 1].isspace():
        end -= 1
    if start < end:
        out.append(Element(text[start:end], start, end))
    return out


def _skip_space(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _words(text: str) -> list[Element]:
    out = []
    for m in _WORD_TOKEN.finditer(text):
        token = m.group()
        a, b = 0, len(token)
        while a < b and is_punct_char(token[a]):
            a += 1
        while b > a and is_punct_char(token[b - 1]):
            b -= 1
        if a < b:
            out.append(Element(token[a:b], m.start(), m.end()))
    return out


def _char_class(text: str, keep: Callable[[str], bool]) -> list[Element]:
    return [Element(ch, i, i + 1) for i, ch in enumerate(text) if keep(ch)]


def _pattern_matches(text: str, pattern: str) -> list[Element]:
    return [Element(m.group(0), m.start(), m.end()) for m in _compiled(pattern).finditer(text)]


def segment(text: str, level: Level, language: str = "en", pattern: str | None = None) -> list[Element]:
    """Split `text` into elements of `level`, ordered by position.

    `pattern` must be supplied exactly when `level` is the regex level.
    Sentence behavior depends on `language`; the remaining levels are
    language-independent.
    """
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    if (pattern is None) == (level is Level.PATTERN):
        raise ValueError("a regex is required for the pattern level and only there")
    if level is Level.ANSWER:
        return [Element(text, 0, len(text))] if text else []
    if level is Level.PARAGRAPH:
        return _paragraphs(text)
    if level is Level.LINE:
        return _lines(text)
    if level is Level.BULLET:
        return _bullets(text)
    if level is Level.SENTENCE:
        if language == "zh":
            return _sentences(text, _ZH_TERMINAL_RUN, require_trailing_space=False)
        return _sentences(text, _EN_TERMINAL_RUN, require_trailing_space=True)
    if level is Level.WORD:
        return _words(text)
    if level is Level.CHARACTER:
        return _char_class(text, is_cjk_char)
    if level is Level.LETTER:
        return _char_class(text, is_ascii_letter)
    if level is Level.PUNC:
        return _char_class(text, is_punct_char)
    return _pattern_matches(text, pattern or "")


def gaps(elements: Sequence[Element], parent_text: str) -> list[Element]:
    """Raw substrings strictly between consecutive element spans (k-1 gaps)."""
    return [
        Element(parent_text[left.end : right.start], left.end, right.start)
        for left, right in zip(elements, elements[1:])
    ]

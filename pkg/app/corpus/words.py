"""
Word selection from running text.

A word is *pure* for a language when every letter is either plain ASCII or
one of that language's diacritics, and it *qualifies* when it is pure and
carries at least one such diacritic.
"""

from __future__ import annotations

import os
import re
import string
from pathlib import Path
from typing import List, Optional

import numpy as np

from app.diacritics import DIACRITIC_TABLE, Language
from app.utils.logger import PROJECT_ROOT

CORPUS_DIR = Path(os.getenv("DIACRITIC_CORPUS_DIR", str(PROJECT_ROOT / "data" / "corpus")))

_TOKEN_RE = re.compile(r"[^\W\d_]+")
_ASCII_LETTERS = frozenset(string.ascii_letters)


class InsufficientWordsError(ValueError):
    """The text holds fewer qualifying words or chunks than requested."""


def tokenize(text: str) -> List[str]:
    """Maximal runs of letters, in order of appearance."""
    return _TOKEN_RE.findall(text)


def is_pure(word: str, lang: Language) -> bool:
    row = DIACRITIC_TABLE.members(lang)
    return all(ch in _ASCII_LETTERS or ch in row for ch in word)


def has_diacritic(word: str, lang: Language) -> bool:
    row = DIACRITIC_TABLE.members(lang)
    return any(ch in row for ch in word)


def pure_tokens(text: str, lang: Language) -> List[str]:
    """Tokens of ``text`` that are pure for ``lang``, with or without diacritics."""
    return [token for token in tokenize(text) if is_pure(token, lang)]


def qualifying_words(text: str, lang: Language) -> List[str]:
    """Distinct qualifying words in first-occurrence order."""
    seen = {}
    for token in pure_tokens(text, lang):
        if token not in seen and has_diacritic(token, lang):
            seen[token] = None
    return list(seen)


def select_words(corpus_text: str, lang: Language, n: int, seed: int, replace: bool = False) -> List[str]:
    """
    Draw ``n`` qualifying words for ``lang``.

    Without ``replace`` the words are distinct, so the text must hold at
    least ``n`` of them.
    """
    if not corpus_text or not corpus_text.strip():
        raise ValueError("Corpus text is empty")
    if n < 0:
        raise ValueError(f"Word count must be non-negative, got {n}")

    candidates = qualifying_words(corpus_text, lang)
    if not candidates or (not replace and len(candidates) < n):
        raise InsufficientWordsError(
            f"{lang.label}: need {n} words with {lang.label} diacritics, found {len(candidates)}"
            + ("" if replace else " (sampling without replacement)")
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(candidates), size=n, replace=replace)
    return [candidates[i] for i in picks]


def randomize_case(
    word: str,
    lang: Language,
    rng: np.random.Generator,
    capitalize_p: float = 0.25,
    upper_p: float = 0.1,
) -> str:
    """
    Capitalize or upper-case ``word`` at random. The change is dropped when it
    would leave the language's row (``ç`` -> ``Ç``) or change any letter
    other than by case (``ß`` -> ``SS``).
    """
    draw = rng.random()
    if draw < upper_p:
        candidate = word.upper()
    elif draw < upper_p + capitalize_p:
        candidate = word[:1].upper() + word[1:]
    else:
        return word
    if candidate.lower() == word.lower() and is_pure(candidate, lang):
        return candidate
    return word


def load_bundled_corpus(lang: Language, corpus_dir: Optional[Path] = None) -> str:
    """Text of ``<corpus_dir>/<Language>.txt``."""
    path = Path(corpus_dir or CORPUS_DIR) / f"{lang.label}.txt"
    if not path.exists():
        raise FileNotFoundError(f"No corpus text for {lang.label} at {path}")
    return path.read_text(encoding="utf-8")

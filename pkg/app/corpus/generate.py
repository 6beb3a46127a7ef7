"""Dataset generators behind ``gen-words`` and ``gen-test``."""

from __future__ import annotations

from typing import List

import numpy as np

from app.corpus.render import AnnotatedImage, TextOverflowError, random_style, render_test_image, render_word
from app.corpus.words import InsufficientWordsError, has_diacritic, pure_tokens, randomize_case, select_words
from app.diacritics import Language
from app.utils.logger import get_logger

logger = get_logger()

# Longest word that always fits one 150px line at the largest glyph height.
MAX_TEST_WORD_LEN = 12
TEST_WORDS_PER_IMAGE = (3, 8)


def generate_word_corpus(
    corpus_text: str,
    lang: Language,
    count: int,
    seed: int,
    replace: bool = False,
) -> List[AnnotatedImage]:
    """``count`` word images of qualifying ``lang`` words, each in a random style."""
    words = select_words(corpus_text, lang, count, seed, replace=replace)
    rng = np.random.default_rng([seed, int(lang), 1])
    images = []
    for word in words:
        word = randomize_case(word, lang, rng)
        image = render_word(word, random_style(rng))
        image.language = lang
        images.append(image)
    logger.info(f"WORD CORPUS GENERATED | lang={lang.label} | images={len(images)} | seed={seed}")
    return images


def generate_test_corpus(corpus_text: str, lang: Language, count: int, seed: int) -> List[AnnotatedImage]:
    """
    ``count`` 150x150 images of ``lang`` text. Each image holds one qualifying
    word plus a few random pure words; words are dropped from the end while
    the text overflows.
    """
    tokens = [t for t in pure_tokens(corpus_text, lang) if len(t) <= MAX_TEST_WORD_LEN]
    anchors = list(dict.fromkeys(t for t in tokens if has_diacritic(t, lang)))
    if not anchors:
        raise InsufficientWordsError(f"{lang.label}: no word with {lang.label} diacritics to build test images from")

    rng = np.random.default_rng([seed, int(lang), 2])
    images = []
    for _ in range(count):
        n_words = int(rng.integers(TEST_WORDS_PER_IMAGE[0], TEST_WORDS_PER_IMAGE[1] + 1))
        words = [anchors[int(rng.integers(len(anchors)))]]
        words += [tokens[int(i)] for i in rng.integers(len(tokens), size=n_words - 1)]
        words = [randomize_case(w, lang, rng) for w in words]
        # the anchor goes to a random slot so it is not always first
        slot = int(rng.integers(len(words)))
        words[0], words[slot] = words[slot], words[0]
        style = random_style(rng)

        while True:
            try:
                images.append(render_test_image(words, lang, style))
                break
            except TextOverflowError:
                if len(words) == 1:
                    raise
                drop = len(words) - 1 if slot != len(words) - 1 else len(words) - 2
                words.pop(drop)
                if drop < slot:
                    slot -= 1
    logger.info(f"TEST CORPUS GENERATED | lang={lang.label} | images={len(images)} | seed={seed}")
    return images

from .generate import generate_test_corpus, generate_word_corpus
from .glyphs import FONT_VARIANTS, GlyphAtlas, UnknownGlyphError, get_atlas
from .render import (
    TEST_IMAGE_SIZE,
    WORD_HEIGHT,
    AnnotatedImage,
    Box,
    RenderStyle,
    TextOverflowError,
    random_style,
    render_test_image,
    render_word,
)
from .storage import CorpusFormatError, read_corpus, write_corpus
from .words import (
    InsufficientWordsError,
    load_bundled_corpus,
    pure_tokens,
    randomize_case,
    select_words,
    tokenize,
)

__all__ = [
    "FONT_VARIANTS",
    "TEST_IMAGE_SIZE",
    "WORD_HEIGHT",
    "AnnotatedImage",
    "Box",
    "CorpusFormatError",
    "GlyphAtlas",
    "InsufficientWordsError",
    "RenderStyle",
    "TextOverflowError",
    "UnknownGlyphError",
    "generate_test_corpus",
    "generate_word_corpus",
    "get_atlas",
    "load_bundled_corpus",
    "pure_tokens",
    "randomize_case",
    "read_corpus",
    "render_test_image",
    "render_word",
    "select_words",
    "tokenize",
    "write_corpus",
]

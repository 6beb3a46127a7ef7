from .table import (
    DIACRITIC_TABLE,
    NUM_DIACRITICS,
    NUM_LANGUAGES,
    DiacriticTable,
    Language,
    canonical_index,
    codepoint_of,
    export_csv,
    language_by_name,
    languages_of,
    unique_diacritics,
)

__all__ = [
    "DIACRITIC_TABLE",
    "NUM_DIACRITICS",
    "NUM_LANGUAGES",
    "DiacriticTable",
    "Language",
    "canonical_index",
    "codepoint_of",
    "export_csv",
    "language_by_name",
    "languages_of",
    "unique_diacritics",
]

"""
Diacritic registry for the 13 supported Latin-script languages.

Each language owns a fixed set of diacritic characters. The union of all
sets holds 85 codepoints; every codepoint gets a global class index that
the detector, the presence vectors and the shallow classifier share.

Index order: walk the language rows from Spanish to Czech and number each
codepoint the first time it is seen.
"""

from __future__ import annotations

import csv
from enum import IntEnum
from pathlib import Path
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple


class Language(IntEnum):
    SPANISH = 0
    GERMAN = 1
    FRENCH = 2
    ITALIAN = 3
    ROMANIAN = 4
    FINNISH = 5
    HUNGARIAN = 6
    ESTONIAN = 7
    DANISH = 8
    DUTCH = 9
    SWEDISH = 10
    PORTUGUESE = 11
    CZECH = 12

    @property
    def label(self) -> str:
        """Display name, e.g. ``"Spanish"``."""
        return self.name.title()


# Row order matters: it fixes the global index order.
_LANGUAGE_ROWS: Tuple[Tuple[Language, str], ...] = (
    (Language.SPANISH, "Á á Ñ ñ"),
    (Language.GERMAN, "Ä ä Ö ö Ü ü ß"),
    (Language.FRENCH, "À à Â â É é È è Ê ê Ë ë Î î Ï ï Ô ô Œ œ Û û ç"),
    (Language.ITALIAN, "À à Ì ì Ò ò Ù ù"),
    (Language.ROMANIAN, "Â â Ă ă Ş ş Ţ ţ"),
    (Language.FINNISH, "Ä ä Ö ö"),
    (Language.HUNGARIAN, "Á á É é Í í Ó ó Ö ö Ő ő Ü ü Ű ű"),
    (Language.ESTONIAN, "Ä ä Õ õ Ö ö Š š"),
    (Language.DANISH, "Å å Æ æ Ø ø"),
    (Language.DUTCH, "Ë ë Ï ï"),
    (Language.SWEDISH, "Ä ä Å å Ö ö"),
    (Language.PORTUGUESE, "Á á Ã ã Ê ê Ô ô Õ õ ç"),
    (Language.CZECH, "Á á É é Ě ě Í í Ó ó Ú ú ů Ý ý Č č Ď ď Ň ň Ř ř Š š Ť ť Ž ž"),
)

NUM_LANGUAGES = len(Language)


class DiacriticTable:
    """
    Immutable view over the language/diacritic incidence matrix.

    Safe to share between threads: nothing is mutated after ``__init__``.
    """

    def __init__(self, rows: Tuple[Tuple[Language, str], ...] = _LANGUAGE_ROWS):
        members: Dict[Language, FrozenSet[str]] = {}
        order: List[str] = []
        seen = set()
        for language, chars in rows:
            row = chars.split()
            members[language] = frozenset(row)
            for ch in row:
                if ch not in seen:
                    seen.add(ch)
                    order.append(ch)

        if set(members) != set(Language):
            raise ValueError("Every language needs exactly one row in the diacritic table")

        self._members: Mapping[Language, FrozenSet[str]] = MappingProxyType(members)
        self._codepoints: Tuple[str, ...] = tuple(order)
        self._index: Mapping[str, int] = MappingProxyType({ch: i for i, ch in enumerate(order)})

        owners: Dict[str, set] = {ch: set() for ch in order}
        for language, row in members.items():
            for ch in row:
                owners[ch].add(language)
        self._owners: Mapping[str, FrozenSet[Language]] = MappingProxyType(
            {ch: frozenset(langs) for ch, langs in owners.items()}
        )

    def __len__(self) -> int:
        return len(self._codepoints)

    def __contains__(self, ch: object) -> bool:
        return ch in self._index

    @property
    def codepoints(self) -> Tuple[str, ...]:
        """All diacritics in global index order."""
        return self._codepoints

    def canonical_index(self, ch: str) -> Optional[int]:
        return self._index.get(ch)

    def codepoint_of(self, index: int) -> str:
        if not 0 <= index < len(self._codepoints):
            raise ValueError(f"Diacritic index out of range: {index}")
        return self._codepoints[index]

    def members(self, language: Language) -> FrozenSet[str]:
        return self._members[Language(language)]

    def languages_of(self, ch: str) -> FrozenSet[Language]:
        return self._owners.get(ch, frozenset())

    def unique_diacritics(self, language: Language) -> FrozenSet[str]:
        """Diacritics of ``language`` that no other row contains."""
        language = Language(language)
        return frozenset(ch for ch in self._members[language] if self._owners[ch] == {language})

    def export_csv(self, path: Path) -> Path:
        """Write ``index,codepoint,languages`` rows (UTF-8) for auditing."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["index", "codepoint", "languages"])
            for index, ch in enumerate(self._codepoints):
                langs = ";".join(lang.label for lang in sorted(self._owners[ch]))
                writer.writerow([index, ch, langs])
        return path


DIACRITIC_TABLE = DiacriticTable()
NUM_DIACRITICS = len(DIACRITIC_TABLE)


def canonical_index(ch: str) -> Optional[int]:
    """Global class index of ``ch``, or None when it is not one of the 85 diacritics."""
    return DIACRITIC_TABLE.canonical_index(ch)


def codepoint_of(index: int) -> str:
    return DIACRITIC_TABLE.codepoint_of(index)


def languages_of(ch: str) -> FrozenSet[Language]:
    return DIACRITIC_TABLE.languages_of(ch)


def unique_diacritics(language: Language) -> FrozenSet[str]:
    return DIACRITIC_TABLE.unique_diacritics(language)


def export_csv(path: Path) -> Path:
    return DIACRITIC_TABLE.export_csv(path)


def language_by_name(name: str) -> Language:
    """Case-insensitive lookup by display name (``"french"`` -> ``Language.FRENCH``)."""
    try:
        return Language[name.strip().upper()]
    except KeyError:
        valid = ", ".join(lang.label for lang in Language)
        raise ValueError(f"Unknown language '{name}'. Expected one of: {valid}") from None

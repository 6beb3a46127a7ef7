"""
Embedded 5-pixel-wide bitmap font.

Each glyph lists rows 3-11 of a 12-row cell ('#' ink, '.' paper). Rows 0-2
are reserved for marks above capitals and ascenders; capitals sit on rows
3-9, lowercase x-height is rows 5-9, descenders use rows 10-11.

Accented letters are not drawn here: they are composed from a base glyph
and one of ``MARKS`` (see ``glyphs.py``).
"""

BASE_GLYPHS = {
    # capitals
    "A": [".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#", ".....", "....."],
    "B": ["####.", "#...#", "#...#", "####.", "#...#", "#...#", "####.", ".....", "....."],
    "C": [".###.", "#...#", "#....", "#....", "#....", "#...#", ".###.", ".....", "....."],
    "D": ["####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####.", ".....", "....."],
    "E": ["#####", "#....", "#....", "####.", "#....", "#....", "#####", ".....", "....."],
    "F": ["#####", "#....", "#....", "####.", "#....", "#....", "#....", ".....", "....."],
    "G": [".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###.", ".....", "....."],
    "H": ["#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#", ".....", "....."],
    "I": [".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###.", ".....", "....."],
    "J": ["..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##..", ".....", "....."],
    "K": ["#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#", ".....", "....."],
    "L": ["#....", "#....", "#....", "#....", "#....", "#....", "#####", ".....", "....."],
    "M": ["#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#", ".....", "....."],
    "N": ["#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", ".....", "....."],
    "O": [".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###.", ".....", "....."],
    "P": ["####.", "#...#", "#...#", "####.", "#....", "#....", "#....", ".....", "....."],
    "Q": [".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#", ".....", "....."],
    "R": ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#", ".....", "....."],
    "S": [".####", "#....", "#....", ".###.", "....#", "....#", "####.", ".....", "....."],
    "T": ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#..", ".....", "....."],
    "U": ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###.", ".....", "....."],
    "V": ["#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#..", ".....", "....."],
    "W": ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#.", ".....", "....."],
    "X": ["#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#", ".....", "....."],
    "Y": ["#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#..", ".....", "....."],
    "Z": ["#####", "....#", "...#.", "..#..", ".#...", "#....", "#####", ".....", "....."],
    "Æ": [".####", "#.#..", "#.#..", "####.", "#.#..", "#.#..", "#.###", ".....", "....."],
    "Œ": [".####", "#.#..", "#.#..", "#.##.", "#.#..", "#.#..", ".####", ".....", "....."],
    "Ø": [".###.", "#..##", "#.#.#", "#.#.#", "#.#.#", "##..#", ".###.", ".....", "....."],
    # lowercase
    "a": [".....", ".....", ".###.", "....#", ".####", "#...#", ".####", ".....", "....."],
    "b": ["#....", "#....", "####.", "#...#", "#...#", "#...#", "####.", ".....", "....."],
    "c": [".....", ".....", ".###.", "#....", "#....", "#....", ".###.", ".....", "....."],
    "d": ["....#", "....#", ".####", "#...#", "#...#", "#...#", ".####", ".....", "....."],
    "e": [".....", ".....", ".###.", "#...#", "#####", "#....", ".###.", ".....", "....."],
    "f": ["..##.", ".#...", "###..", ".#...", ".#...", ".#...", ".#...", ".....", "....."],
    "g": [".....", ".....", ".####", "#...#", "#...#", "#...#", ".####", "....#", ".###."],
    "h": ["#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#", ".....", "....."],
    "i": ["..#..", ".....", ".##..", "..#..", "..#..", "..#..", ".###.", ".....", "....."],
    "ı": [".....", ".....", ".##..", "..#..", "..#..", "..#..", ".###.", ".....", "....."],
    "j": ["...#.", ".....", "..##.", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."],
    "k": ["#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#.", ".....", "....."],
    "l": [".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###.", ".....", "....."],
    "m": [".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#.#.#", ".....", "....."],
    "n": [".....", ".....", "####.", "#...#", "#...#", "#...#", "#...#", ".....", "....."],
    "o": [".....", ".....", ".###.", "#...#", "#...#", "#...#", ".###.", ".....", "....."],
    "p": [".....", ".....", "####.", "#...#", "#...#", "#...#", "####.", "#....", "#...."],
    "q": [".....", ".....", ".####", "#...#", "#...#", "#...#", ".####", "....#", "....#"],
    "r": [".....", ".....", "#.##.", "##..#", "#....", "#....", "#....", ".....", "....."],
    "s": [".....", ".....", ".####", "#....", ".###.", "....#", "####.", ".....", "....."],
    "t": [".#...", ".#...", "####.", ".#...", ".#...", ".#..#", "..##.", ".....", "....."],
    "u": [".....", ".....", "#...#", "#...#", "#...#", "#..##", ".##.#", ".....", "....."],
    "v": [".....", ".....", "#...#", "#...#", "#...#", ".#.#.", "..#..", ".....", "....."],
    "w": [".....", ".....", "#...#", "#...#", "#.#.#", "#.#.#", ".#.#.", ".....", "....."],
    "x": [".....", ".....", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", ".....", "....."],
    "y": [".....", ".....", "#...#", "#...#", "#...#", ".####", "....#", "#...#", ".###."],
    "z": [".....", ".....", "#####", "...#.", "..#..", ".#...", "#####", ".....", "....."],
    "ß": [".##..", "#..#.", "#..#.", "#.#..", "#..#.", "#...#", "#.##.", ".....", "....."],
    "æ": [".....", ".....", "##.#.", "..#.#", ".####", "#.#..", ".#.##", ".....", "....."],
    "œ": [".....", ".....", ".#.#.", "#.#.#", "#.###", "#.#..", ".#.##", ".....", "....."],
    "ø": [".....", "....#", ".###.", "#..##", "#.#.#", "##..#", ".###.", ".....", "....."],
    # digits
    "0": [".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###.", ".....", "....."],
    "1": ["..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###.", ".....", "....."],
    "2": [".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####", ".....", "....."],
    "3": ["####.", "....#", "....#", ".###.", "....#", "....#", "####.", ".....", "....."],
    "4": ["...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#.", ".....", "....."],
    "5": ["#####", "#....", "####.", "....#", "....#", "#...#", ".###.", ".....", "....."],
    "6": [".###.", "#....", "#....", "####.", "#...#", "#...#", ".###.", ".....", "....."],
    "7": ["#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#...", ".....", "....."],
    "8": [".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###.", ".....", "....."],
    "9": [".###.", "#...#", "#...#", ".####", "....#", "....#", ".###.", ".....", "....."],
    # punctuation
    "-": [".....", ".....", ".....", ".....", ".###.", ".....", ".....", ".....", "....."],
    "'": ["..#..", "..#..", ".....", ".....", ".....", ".....", ".....", ".....", "....."],
    ".": [".....", ".....", ".....", ".....", ".....", ".....", "..#..", ".....", "....."],
    ",": [".....", ".....", ".....", ".....", ".....", ".....", "..#..", ".#...", "....."],
    " ": [".....", ".....", ".....", ".....", ".....", ".....", ".....", ".....", "....."],
}

# Two-row marks, keyed by the combining character they stand for.
MARKS = {
    "\u0300": (".#...", "..#.."),  # grave
    "\u0301": ("...#.", "..#.."),  # acute
    "\u0302": ("..#..", ".#.#."),  # circumflex
    "\u0303": (".##.#", "#.##."),  # tilde
    "\u0306": ("#...#", ".###."),  # breve
    "\u0308": (".....", ".#.#."),  # diaeresis
    "\u030A": (".###.", ".#.#."),  # ring
    "\u030B": ("..#.#", ".#.#."),  # double acute
    "\u030C": (".#.#.", "..#.."),  # caron
    "\u0327": ("..#..", ".##.."),  # cedilla, drawn below the baseline
}

BELOW_MARKS = frozenset({"\u0327"})

"""Unicode script classification for single characters.

Only the distinctions needed for English/Chinese/Japanese/Korean corpora are
made; everything else collapses into ``OTHER``.
"""

import unicodedata

HAN = "Han"
HIRAGANA = "Hiragana"
KATAKANA = "Katakana"
HANGUL = "Hangul"
LATIN = "Latin"
DIGIT = "Digit"
OTHER = "Other"

_RANGES = (
    (0x1100, 0x11FF, HANGUL),
    (0x3040, 0x309F, HIRAGANA),
    (0x30A0, 0x30FF, KATAKANA),
    (0x3130, 0x318F, HANGUL),
    (0x31F0, 0x31FF, KATAKANA),
    (0x3400, 0x4DBF, HAN),
    (0x4E00, 0x9FFF, HAN),
    (0xA960, 0xA97F, HANGUL),
    (0xAC00, 0xD7AF, HANGUL),
    (0xD7B0, 0xD7FF, HANGUL),
    (0xF900, 0xFAFF, HAN),
    (0xFF66, 0xFF9F, KATAKANA),
    (0xFFA0, 0xFFDC, HANGUL),
    (0x20000, 0x323AF, HAN),
)


def script_of(ch):
    """Return the script name of a single character."""
    cp = ord(ch)
    for lo, hi, name in _RANGES:
        if lo <= cp <= hi:
            # U+30FB (middle dot) and U+3000-range punctuation are not letters
            if name in (KATAKANA, HIRAGANA) and not ch.isalpha():
                return OTHER
            return name
    if ch.isdigit():
        return DIGIT
    if ch.isalpha():
        try:
            if unicodedata.name(ch).startswith("LATIN"):
                return LATIN
        except ValueError:
            pass
    return OTHER


def is_kana(script):
    return script in (HIRAGANA, KATAKANA)


def has_letter(token):
    return any(ch.isalpha() for ch in token)

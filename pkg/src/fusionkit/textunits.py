"""Text unit counting shared by ingest chunking and corpus budgeting.

A "unit" is the approximate-token currency used everywhere a budget or
window size is expressed: one unit per CJK codepoint plus one unit per
whitespace-delimited token containing a Latin letter or digit.
"""

from __future__ import annotations

import re

# Han ideograph blocks; enough to classify zh fusion text that mixes in
# Latin acronyms (EAST, ITER) without counting those acronyms as CJK.
_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2FA1F),
)

_LATIN_OR_DIGIT = re.compile(r"[A-Za-z0-9À-ɏḀ-ỿ]")
_LATIN_LETTER = re.compile(r"[A-Za-zÀ-ɏḀ-ỿ]")


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def count_cjk(text: str) -> int:
    return sum(1 for ch in text if is_cjk(ch))


def has_latin_letter(text: str) -> bool:
    return bool(_LATIN_LETTER.search(text))


def has_latin_or_digit(text: str) -> bool:
    return bool(_LATIN_OR_DIGIT.search(text))


def approx_token_count(text: str) -> int:
    """Whitespace tokens containing a Latin letter or digit, plus CJK codepoints.

    Empty text counts 0. Punctuation-only tokens count 0.
    """
    words = sum(1 for tok in text.split() if _LATIN_OR_DIGIT.search(tok))
    return words + count_cjk(text)

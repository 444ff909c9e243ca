"""Number verbalization grammar: cardinals, ordinals, and years.

Style is fixed for output stability: no hyphens and no "and"
("forty two", not "forty-two" or "forty and two"). Digit groups past
the largest named scale (999 quintillion, 21 digits) are read digit by
digit instead of inventing scale names.
"""

from __future__ import annotations

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_TENS = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety",
]
_SCALES = ["", "thousand", "million", "billion", "trillion", "quadrillion",
           "quintillion"]

_MAX_CARDINAL = 10 ** (3 * len(_SCALES)) - 1

_ORDINAL_IRREGULAR = {
    "one": "first", "two": "second", "three": "third", "five": "fifth",
    "eight": "eighth", "nine": "ninth", "twelve": "twelfth",
}


def _below_thousand(n: int) -> str:
    parts = []
    if n >= 100:
        parts.append(_ONES[n // 100])
        parts.append("hundred")
        n %= 100
    if n >= 20:
        parts.append(_TENS[n // 10])
        n %= 10
        if n:
            parts.append(_ONES[n])
    elif n or not parts:
        parts.append(_ONES[n])
    return " ".join(parts)


def cardinal(n: int) -> str:
    """Spell out a nonnegative integer as a cardinal."""
    if n < 0:
        raise ValueError(f"cardinal undefined for negative value {n}")
    if n == 0:
        return "zero"
    if n > _MAX_CARDINAL:
        return digits(str(n))
    groups: list[str] = []
    scale = 0
    while n:
        n, chunk = divmod(n, 1000)
        if chunk:
            word = _below_thousand(chunk)
            groups.append(f"{word} {_SCALES[scale]}".strip())
        scale += 1
    return " ".join(reversed(groups))


def ordinal(n: int) -> str:
    """Spell out a positive integer as an ordinal ("forty second")."""
    if n < 1:
        raise ValueError(f"ordinal undefined for {n}")
    words = cardinal(n).split()
    last = words[-1]
    if last in _ORDINAL_IRREGULAR:
        words[-1] = _ORDINAL_IRREGULAR[last]
    elif last.endswith("y"):
        words[-1] = last[:-1] + "ieth"
    else:
        words[-1] = last + "th"
    return " ".join(words)


def year(n: int) -> str:
    """Read a year the way it is spoken ("nineteen ninety nine").

    Four-digit years from 1100 on are read as two pairs; the 2000s fall
    back to plain cardinals ("two thousand seven"). Everything else is a
    cardinal.
    """
    if 1100 <= n <= 9999 and not 2000 <= n <= 2009:
        high, low = divmod(n, 100)
        if low == 0:
            return f"{_below_thousand(high)} hundred"
        if low < 10:
            return f"{_below_thousand(high)} oh {_ONES[low]}"
        return f"{_below_thousand(high)} {_below_thousand(low)}"
    return cardinal(n)


def digits(digit_group: str) -> str:
    """Read a digit string one digit at a time ("nine one one")."""
    return " ".join(_ONES[int(d)] for d in digit_group)

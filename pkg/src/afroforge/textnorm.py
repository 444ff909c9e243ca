"""TTS front-end text normalization.

Three passes run in a fixed order: abbreviation/title expansion, number
verbalization, punctuation verbalization. The order matters (expansions
may introduce words next to digits but never digits themselves), and the
composed pipeline is idempotent: a second pass is a no-op.

The shipped abbreviation table (Alh, Maj, Dr, Mr, Mrs, Prof, St) is a
pragmatic default, not a canonical inventory; projects are expected to
load their own via :func:`load_rules`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import numwords

REQUIRED_PUNCTUATION = ("(", ")", ":", ";")

DEFAULT_ABBREVIATIONS = {
    "Alh": "Alhaji",
    "Maj": "Major",
    "Dr": "Doctor",
    "Mr": "Mister",
    "Mrs": "Missus",
    "Prof": "Professor",
    "St": "Saint",
}

DEFAULT_PUNCTUATION = {
    "(": "open bracket",
    ")": "closed bracket",
    ":": "colon",
    ";": "semicolon",
}


class RulesError(ValueError):
    """Raised when a rule table violates its invariants."""


def _abbrev_regex(keys: list[str]) -> re.Pattern[str]:
    # First letter matches case-exactly, the rest case-insensitively, so
    # "MAJ" expands but "maj" (an ordinary word start) does not.
    alts = []
    for key in sorted(keys, key=len, reverse=True):
        rest = "".join(f"[{c.lower()}{c.upper()}]" for c in key[1:])
        alts.append(re.escape(key[0]) + rest)
    return re.compile(rf"(?<!\w)(?:{'|'.join(alts)})\.?(?!\w)")


@dataclass(frozen=True)
class NormalizationRules:
    """Immutable rule tables driving the normalization pipeline."""

    abbreviation_map: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_ABBREVIATIONS))
    punctuation_map: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_PUNCTUATION))
    decimal_word: str = "point"

    def __post_init__(self) -> None:
        for key, expansion in self.abbreviation_map.items():
            if not key.isalpha():
                raise RulesError(f"abbreviation key {key!r} must be alphabetic")
            if re.search(r"\d", expansion):
                raise RulesError(
                    f"expansion {expansion!r} for {key!r} contains digits")
        # An expansion containing another key as a whole token would make
        # the pipeline non-idempotent; reject such tables outright.
        keys_lower = {k.lower() for k in self.abbreviation_map}
        for expansion in self.abbreviation_map.values():
            for tok in re.findall(r"[A-Za-z]+", expansion):
                if tok.lower() in keys_lower:
                    raise RulesError(
                        f"expansion {expansion!r} contains abbreviation key "
                        f"{tok!r}; table would not be idempotent")
        missing = [s for s in REQUIRED_PUNCTUATION
                   if s not in self.punctuation_map]
        if missing:
            raise RulesError(f"punctuation_map missing symbols: {missing}")
        for sym, spoken in self.punctuation_map.items():
            if len(sym) != 1 or sym.isalnum():
                raise RulesError(f"punctuation symbol {sym!r} must be a "
                                 "single non-alphanumeric character")
            if not spoken or re.search(r"\d", spoken):
                raise RulesError(f"spoken form {spoken!r} for {sym!r} invalid")


def load_rules(path: str | Path) -> NormalizationRules:
    """Load rule tables from a JSON file.

    Expected shape: ``{"abbreviations": {...}, "punctuation": {...}}``.
    Missing sections fall back to the shipped defaults. Duplicate keys in
    the JSON are an error rather than a silent last-one-wins.
    """
    def reject_dupes(pairs):
        out = {}
        for k, v in pairs:
            if k in out:
                raise RulesError(f"duplicate key {k!r} in rules file")
            out[k] = v
        return out

    raw = json.loads(Path(path).read_text(encoding="utf-8"),
                     object_pairs_hook=reject_dupes)
    return NormalizationRules(
        abbreviation_map=dict(raw.get("abbreviations", DEFAULT_ABBREVIATIONS)),
        punctuation_map=dict(raw.get("punctuation", DEFAULT_PUNCTUATION)),
        decimal_word=raw.get("decimal_word", "point"),
    )


def expand_abbreviations(text: str, rules: NormalizationRules) -> str:
    """Expand whole-token abbreviation matches (trailing period consumed)."""
    if not rules.abbreviation_map:
        return text
    lookup = {k[0] + k[1:].lower(): v for k, v in rules.abbreviation_map.items()}

    def repl(m: re.Match[str]) -> str:
        tok = m.group(0).rstrip(".")
        return lookup[tok[0] + tok[1:].lower()]

    return _abbrev_regex(list(rules.abbreviation_map)).sub(repl, text)


def verbalize_numbers(text: str, rules: NormalizationRules) -> str:
    """Replace each maximal digit group with its cardinal word form.

    A group with a decimal point reads the integer part as a cardinal and
    the fraction digit by digit ("3.5" -> "three point five").
    """
    def repl(m: re.Match[str]) -> str:
        whole, _, frac = m.group(0).partition(".")
        words = numwords.cardinal(int(whole))
        if frac:
            words += f" {rules.decimal_word} {numwords.digits(frac)}"
        return words

    return re.sub(r"\d+(?:\.\d+)?", repl, text)


def verbalize_punctuation(text: str, rules: NormalizationRules) -> str:
    """Replace mapped symbols with their spoken forms, space-delimited.

    Whitespace adjacent to a replaced symbol is absorbed into the
    replacement so exactly one space separates the spoken form from its
    neighbors; text without mapped symbols is returned byte-identical.
    """
    sym_alt = "|".join(re.escape(s) for s in rules.punctuation_map)
    if not sym_alt:
        return text
    run = re.compile(rf"\s*(?:(?:{sym_alt})\s*)+")
    sym_re = re.compile(sym_alt)

    def repl(m: re.Match[str]) -> str:
        words = [rules.punctuation_map[s] for s in sym_re.findall(m.group(0))]
        prefix = "" if m.start() == 0 else " "
        suffix = "" if m.end() == len(m.string) else " "
        return prefix + " ".join(words) + suffix

    return run.sub(repl, text)


def normalize_text(text: str, rules: NormalizationRules | None = None) -> str:
    """Run the full pipeline: abbreviations, then numbers, then punctuation."""
    rules = rules or NormalizationRules()
    out = expand_abbreviations(text, rules)
    out = verbalize_numbers(out, rules)
    return verbalize_punctuation(out, rules)

"""Text normalization: abbreviations, numbers, punctuation, composition."""

from __future__ import annotations

import json
import re

import pytest
from hypothesis import given, strategies as st

from afroforge import numwords
from afroforge.textnorm import (
    DEFAULT_ABBREVIATIONS,
    NormalizationRules,
    RulesError,
    expand_abbreviations,
    load_rules,
    normalize_text,
    verbalize_numbers,
    verbalize_punctuation,
)
from oracles import reference_cardinal

RULES = NormalizationRules()


class TestCardinals:
    def test_matches_reference_table_0_to_1000(self):
        for n in range(1001):
            assert numwords.cardinal(n) == reference_cardinal(n), n

    @pytest.mark.parametrize("n,words", [
        (0, "zero"),
        (2, "two"),
        (42, "forty two"),
        (100, "one hundred"),
        (115, "one hundred fifteen"),
        (999, "nine hundred ninety nine"),
        (1000, "one thousand"),
        (2500, "two thousand five hundred"),
        (1000000, "one million"),
    ])
    def test_spot_values(self, n, words):
        assert numwords.cardinal(n) == words

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            numwords.cardinal(-1)

    def test_huge_group_read_digitwise(self):
        n = int("9" * 21 + "1")  # 22 digits, beyond 999 quintillion
        assert numwords.cardinal(n).startswith("nine nine")

    @pytest.mark.parametrize("n,words", [
        (1, "first"), (2, "second"), (3, "third"), (4, "fourth"),
        (12, "twelfth"), (20, "twentieth"), (42, "forty second"),
        (100, "one hundredth"),
    ])
    def test_ordinals(self, n, words):
        assert numwords.ordinal(n) == words

    @pytest.mark.parametrize("n,words", [
        (1999, "nineteen ninety nine"),
        (1900, "nineteen hundred"),
        (1905, "nineteen oh five"),
        (2007, "two thousand seven"),
        (2024, "twenty twenty four"),
        (842, "eight hundred forty two"),
    ])
    def test_years(self, n, words):
        assert numwords.year(n) == words


class TestAbbreviations:
    def test_maj_expands(self):
        assert expand_abbreviations("Maj Adeyemi arrived", RULES) == \
            "Major Adeyemi arrived"

    def test_alh_expands(self):
        assert expand_abbreviations("Alh Musa", RULES) == "Alhaji Musa"

    def test_whole_token_only(self):
        assert expand_abbreviations("Majority rule", RULES) == "Majority rule"

    def test_trailing_period_consumed(self):
        assert expand_abbreviations("Dr. Okoye spoke", RULES) == \
            "Doctor Okoye spoke"

    def test_first_letter_case_sensitive(self):
        assert expand_abbreviations("maj problem", RULES) == "maj problem"
        assert expand_abbreviations("MAJ Adeyemi", RULES) == "Major Adeyemi"

    def test_longest_key_wins(self):
        rules = NormalizationRules(
            abbreviation_map={"Mr": "Mister", "Mrs": "Missus"})
        assert expand_abbreviations("Mrs Bello", rules) == "Missus Bello"
        assert expand_abbreviations("Mr Bello", rules) == "Mister Bello"


class TestNumbers:
    def test_unit_cardinal(self):
        assert verbalize_numbers("2 doses", RULES) == "two doses"

    def test_room_42(self):
        assert verbalize_numbers("room 42", RULES) == \
            f"room {reference_cardinal(42)}"

    def test_1000_personas(self):
        assert verbalize_numbers("1000 personas", RULES) == \
            f"{reference_cardinal(1000)} personas"

    def test_every_cardinal_embedded_in_text(self):
        for n in (0, 7, 19, 21, 40, 99, 101, 110, 342, 900, 1000):
            assert verbalize_numbers(f"x {n} y", RULES) == \
                f"x {reference_cardinal(n)} y"

    def test_decimal_read_digitwise(self):
        assert verbalize_numbers("3.5 mg", RULES) == "three point five mg"
        assert verbalize_numbers("3.14", RULES) == "three point one four"


class TestPunctuation:
    def test_bracket_colon_sentence(self):
        assert verbalize_punctuation("dose (daily): two", RULES) == \
            "dose open bracket daily closed bracket colon two"

    def test_semicolon(self):
        assert verbalize_punctuation("a; b", RULES) == "a semicolon b"

    def test_unmapped_preserved(self):
        assert verbalize_punctuation("Hello, world.", RULES) == "Hello, world."

    def test_symbol_at_string_edges(self):
        assert verbalize_punctuation("(a)", RULES) == \
            "open bracket a closed bracket"

    def test_adjacent_symbols_single_spaced(self):
        out = verbalize_punctuation("x(:y", RULES)
        assert out == "x open bracket colon y"
        assert "  " not in out


class TestNormalizeText:
    def test_composition_example(self):
        assert normalize_text("Maj Okafor: 2 pills", RULES) == \
            "Major Okafor colon two pills"

    def test_empty(self):
        assert normalize_text("", RULES) == ""

    def test_equals_composed_steps(self):
        text = "Alh Bello (born 1962); cf. 3 items: Dr Ade"
        composed = verbalize_punctuation(
            verbalize_numbers(expand_abbreviations(text, RULES), RULES), RULES)
        assert normalize_text(text, RULES) == composed

    def test_idempotent_on_curated(self):
        for text in ("Maj Okafor: 2 pills", "(a; b)", "42nd street",
                     "No digits here at all."):
            once = normalize_text(text, RULES)
            assert normalize_text(once, RULES) == once

    def test_digit_free(self):
        out = normalize_text("ids 7, 19 and 2048 (see: 3.5)", RULES)
        assert not re.search(r"[0-9]", out)

    @given(st.text(alphabet=st.characters(
        blacklist_categories=("Cs",)), max_size=80))
    def test_idempotence_and_digit_freedom_fuzz(self, text):
        once = normalize_text(text, RULES)
        assert normalize_text(once, RULES) == once
        assert not re.search(r"[0-9]", once)

    @given(st.text(alphabet="abcdefgh ,.!?'\"- \n\t", max_size=80))
    def test_locality_identity_on_nonmatching_text(self, text):
        # No digits, no mapped symbols, no abbreviation tokens: identity.
        assert normalize_text(text, RULES) == text


class TestRules:
    def test_expansion_with_digits_rejected(self):
        with pytest.raises(RulesError):
            NormalizationRules(abbreviation_map={"No": "number 1"})

    def test_expansion_containing_key_rejected(self):
        with pytest.raises(RulesError):
            NormalizationRules(
                abbreviation_map={"St": "Saint", "Saint": "St"})

    def test_punctuation_coverage_required(self):
        with pytest.raises(RulesError):
            NormalizationRules(punctuation_map={"(": "open bracket"})

    def test_default_table_contents(self):
        assert DEFAULT_ABBREVIATIONS["Alh"] == "Alhaji"
        assert DEFAULT_ABBREVIATIONS["Maj"] == "Major"

    def test_load_rules_roundtrip(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps({
            "abbreviations": {"Gen": "General"},
            "punctuation": {"(": "open bracket", ")": "closed bracket",
                            ":": "colon", ";": "semicolon"},
        }), encoding="utf-8")
        rules = load_rules(path)
        assert expand_abbreviations("Gen Abacha", rules) == "General Abacha"

    def test_load_rules_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(
            '{"abbreviations": {"Dr": "Doctor", "Dr": "Drive"}}',
            encoding="utf-8")
        with pytest.raises(RulesError):
            load_rules(path)

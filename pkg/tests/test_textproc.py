"""Tokenization and label normalization."""

import pytest
from hypothesis import given, strategies as st

from argmap.errors import DegenerateLabelError
from argmap.textproc import (
    LabelType,
    NormalizationRules,
    default_rules,
    load_rules,
    normalize_label,
    singularize,
    tokenize,
)


class TestTokenize:
    def test_case_fold_and_punctuation(self):
        assert tokenize("Ban Guns!") == ["ban", "guns"]

    def test_empty(self):
        assert tokenize("") == []

    def test_hyphen_and_digits(self):
        assert tokenize("climate-change 2020") == ["climate", "change", "2020"]

    def test_punctuation_only(self):
        assert tokenize("... !! --") == []

    def test_unicode(self):
        assert tokenize("Überwachung im Café") == ["überwachung", "im", "café"]

    def test_deterministic(self):
        text = "Some Mixed-Case text, with punctuation! And 123 digits?"
        assert tokenize(text) == tokenize(text)

    def test_no_empty_tokens(self):
        assert all(tokenize("a, b, , c!!")) and "" not in tokenize("a  b\t\nc")


@pytest.fixture(scope="module")
def rules():
    return default_rules()


class TestNormalizeLabel:

    def test_cliche_then_stance_then_singular(self, rules):
        assert normalize_label("This house should ban guns", rules) == ("gun", LabelType.IMPERATIVE)

    def test_plain_concept(self, rules):
        assert normalize_label("plastic bottles", rules) == ("plastic bottle", LabelType.CONCEPT)

    def test_question(self, rules):
        assert normalize_label("Legalize cannabis?", rules) == ("cannabis", LabelType.QUESTION)

    def test_comparison_versus(self, rules):
        normalized, label_type = normalize_label("public versus private schools", rules)
        assert label_type is LabelType.COMPARISON
        assert normalized == "public versus private school"

    def test_comparison_or(self, rules):
        _, label_type = normalize_label("tea or coffee", rules)
        assert label_type is LabelType.COMPARISON

    def test_conclusion(self, rules):
        normalized, label_type = normalize_label("Homework is beneficial", rules)
        assert label_type is LabelType.CONCLUSION
        assert normalized == "homework is beneficial"

    def test_whitespace_collapsed_and_lowercased(self, rules):
        normalized, _ = normalize_label("  Renewable   ENERGY  ", rules)
        assert normalized == "renewable energy"

    def test_degenerate_label(self, rules):
        with pytest.raises(DegenerateLabelError):
            normalize_label("ban", rules)

    def test_empty_label(self, rules):
        with pytest.raises(DegenerateLabelError):
            normalize_label("   ", rules)

    def test_idempotent_on_examples(self, rules):
        labels = [
            "This house should ban guns",
            "plastic bottles",
            "Legalize cannabis?",
            "public versus private schools",
            "Homework is beneficial",
            "climate change",
            "Should we adopt green taxes?",
            "nuclear energy",
            "death penalty",
            "social media addiction",
        ]
        for raw in labels:
            normalized, _ = normalize_label(raw, rules)
            again, _ = normalize_label(normalized, rules)
            assert again == normalized, raw

    @given(st.text(alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd", "Zs")), min_size=1, max_size=40))
    def test_idempotent_random(self, raw):
        rules = default_rules()
        try:
            normalized, _ = normalize_label(raw, rules)
        except DegenerateLabelError:
            return
        again, _ = normalize_label(normalized, rules)
        assert again == normalized

    def test_no_new_tokens(self, rules):
        for raw in ["This house should ban guns", "women in STEM fields", "lowering taxes or raising wages"]:
            normalized, _ = normalize_label(raw, rules)
            allowed = {singularize(t, rules.singular_exceptions) for t in tokenize(raw)}
            assert set(normalized.split()) <= allowed


class TestSingularize:
    def test_suffix_rules(self):
        cases = {
            "guns": "gun",
            "bottles": "bottle",
            "cities": "city",
            "classes": "class",
            "boxes": "box",
            "churches": "church",
            "tomatoes": "tomato",
            "cannabis": "cannabis",
            "glass": "glass",
            "virus": "virus",
            "analysis": "analysis",
            "gun": "gun",
        }
        for plural, singular in cases.items():
            assert singularize(plural) == singular, plural

    def test_exception_table(self):
        exceptions = default_rules().singular_exceptions
        assert singularize("children", exceptions) == "child"
        assert singularize("women", exceptions) == "woman"
        assert singularize("news", exceptions) == "news"
        assert singularize("this", exceptions) == "this"

    def test_fixed_point(self):
        exceptions = default_rules().singular_exceptions
        words = ["guns", "cities", "classes", "children", "news", "bottles", "taxes", "heroes", "wolves"]
        for word in words:
            once = singularize(word, exceptions)
            assert singularize(once, exceptions) == once, word


class TestRulesLoading:
    def test_custom_rules_override(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(
            '{"cliche_patterns": ["the debate about"], "stance_words": ["forbid"],'
            ' "singular_exceptions": {"oxen": "ox"}}',
            encoding="utf-8",
        )
        rules = load_rules(path)
        assert normalize_label("The debate about forbid oxen", rules)[0] == "ox"

    def test_rules_reject_empty_pattern(self):
        with pytest.raises(Exception):
            NormalizationRules(cliche_patterns=("",), stance_words=frozenset({"ban"}))

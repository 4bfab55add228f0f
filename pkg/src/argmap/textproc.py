"""Tokenization and topic-label normalization.

:func:`tokenize` is the single segmentation shared by every scoring
component.  :func:`normalize_label` reduces a raw corpus topic label to its
central target issue: cliche phrases are stripped first, stance-indicating
words are dropped next, and the remaining words are heuristically
singularized.  The rule lists ship as overridable JSON data.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import DegenerateLabelError, ParseError
from .jsonl import get_field

TokenSeq = list[str]

_WORD_RE = re.compile(r"\w+", re.UNICODE)

# Surface cues for label-type classification.  These drive classification
# only, never the normalized output, so they are module constants rather
# than user-editable rule data.
_COMPARISON_MARKERS = frozenset({"vs", "versus"})
_CLAIM_MARKERS = frozenset({
    "is", "are", "was", "were", "be", "being", "been",
    "should", "must", "ought", "shall", "will", "would",
    "can", "cannot", "may", "might",
})


def tokenize(text: str) -> TokenSeq:
    """Case-fold ``text`` and split it at Unicode word boundaries.

    Punctuation-only segments are dropped; an empty input yields an empty
    list.  Deterministic: equal inputs give equal outputs.
    """
    return _WORD_RE.findall(text.casefold())


class LabelType(Enum):
    """The five surface forms a corpus topic label can take."""

    CONCEPT = "concept"
    COMPARISON = "comparison"
    CONCLUSION = "conclusion"
    QUESTION = "question"
    IMPERATIVE = "imperative"


@dataclass(frozen=True)
class NormalizationRules:
    """Rule data for :func:`normalize_label`.

    ``cliche_patterns`` are matched case-insensitively at word boundaries
    and stripped in list order.  ``stance_words`` are dropped wherever they
    appear.  ``singular_exceptions`` maps irregular or protected forms to
    their singular (identity entries keep words like "news" intact).
    """

    cliche_patterns: tuple[str, ...]
    stance_words: frozenset[str]
    singularization: bool = True
    singular_exceptions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for pattern in self.cliche_patterns:
            if not pattern or not pattern.strip():
                raise ParseError("cliche patterns must be non-empty strings")
        for word in self.stance_words:
            if not word or not word.strip():
                raise ParseError("stance words must be non-empty strings")


def load_rules(source) -> NormalizationRules:
    """Load a rules file: {"cliche_patterns": [...], "stance_words": [...], "singular_exceptions": {...}}."""
    if hasattr(source, "read"):
        raw = source.read()
        where = getattr(source, "name", "<stream>")
    else:
        with open(source, "r", encoding="utf-8") as handle:
            raw = handle.read()
        where = str(source)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected a JSON object")
    patterns = get_field(data, "cliche_patterns", list, where, 0)
    stance = get_field(data, "stance_words", list, where, 0)
    exceptions = get_field(data, "singular_exceptions", dict, where, 0, optional=True) or {}
    singularization = data.get("singularization", True)
    return NormalizationRules(
        cliche_patterns=tuple(patterns),
        stance_words=frozenset(w.casefold() for w in stance),
        singularization=bool(singularization),
        singular_exceptions={k.casefold(): v.casefold() for k, v in exceptions.items()},
    )


def default_rules() -> NormalizationRules:
    """The rules shipped with the package (English debate-label defaults)."""
    with resources.files("argmap.data").joinpath("normalization_rules.json").open("r", encoding="utf-8") as handle:
        return load_rules(handle)


def singularize(word: str, exceptions: dict[str, str] | None = None) -> str:
    """Heuristic English singularization: exception table, then suffix rules."""
    exceptions = exceptions or {}
    if word in exceptions:
        return exceptions[word]
    if len(word) > 4 and word.endswith("ies"):
        return word[:-3] + "y"
    for suffix in ("sses", "shes", "ches", "xes", "zes"):
        if word.endswith(suffix):
            return word[:-2]
    if len(word) > 4 and word.endswith("oes"):
        return word[:-2]
    if len(word) > 3 and word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def _strip_cliches(text: str, patterns: tuple[str, ...]) -> str:
    for pattern in patterns:
        regex = re.compile(r"\b" + re.escape(pattern.strip()) + r"\b", re.IGNORECASE)
        text = regex.sub(" ", text)
    return text


def _classify(stripped: str, tokens: TokenSeq, rules: NormalizationRules) -> LabelType:
    if stripped.rstrip().endswith("?"):
        return LabelType.QUESTION
    if tokens and tokens[0] in rules.stance_words:
        return LabelType.IMPERATIVE
    if any(t in _COMPARISON_MARKERS for t in tokens):
        return LabelType.COMPARISON
    if any(t == "or" for t in tokens[1:-1]):
        return LabelType.COMPARISON
    if any(t in _CLAIM_MARKERS for t in tokens):
        return LabelType.CONCLUSION
    return LabelType.CONCEPT


def normalize_label(raw: str, rules: NormalizationRules) -> tuple[str, LabelType]:
    """Normalize a raw topic label and classify its surface form.

    Pipeline: strip cliche phrases, classify on the stripped text, drop
    stance words, singularize what remains, lowercase and collapse
    whitespace.  Raises :class:`DegenerateLabelError` when nothing is left.
    """
    if not raw or not raw.strip():
        raise DegenerateLabelError("label is empty")
    stripped = _strip_cliches(raw, rules.cliche_patterns)
    tokens = _WORD_RE.findall(stripped.casefold())
    label_type = _classify(stripped, tokens, rules)
    kept = [t for t in tokens if t not in rules.stance_words]
    if rules.singularization:
        kept = [singularize(t, rules.singular_exceptions) for t in kept]
    normalized = " ".join(kept)
    if not normalized:
        raise DegenerateLabelError(f"label {raw!r} normalized to an empty string")
    return normalized, label_type

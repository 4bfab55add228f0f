"""Argument corpora as uniform unit streams.

One record per unit, whatever the original granularity (argument, sentence,
essay, debate, speech).  Loading preserves file order and never alters text
or label bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IntegrityError
from .jsonl import dump_record, get_field, iter_records, open_lines


@dataclass(frozen=True)
class CorpusUnit:
    """One argumentative text unit with an optional raw topic label."""

    corpus: str
    unit_id: str
    text: str
    raw_label: str | None = None
    granularity: str | None = None

    @property
    def uid(self) -> str:
        """Corpus-qualified id, unique across corpora."""
        return f"{self.corpus}:{self.unit_id}"


@dataclass
class Corpus:
    """An ordered collection of units sharing one corpus name."""

    name: str
    units: list[CorpusUnit]

    @property
    def labeled(self) -> bool:
        """True iff every unit carries a raw topic label."""
        return all(u.raw_label is not None for u in self.units)


def load_corpus(source) -> Corpus:
    """Load a corpus from line-delimited JSON records.

    Records: {"corpus","unit_id","text","raw_label"?,"granularity"?}.
    All records in one file must share the same corpus name.
    """
    lines, where, needs_close = open_lines(source)
    units: list[CorpusUnit] = []
    seen: set[tuple[str, str]] = set()
    name: str | None = None
    try:
        for lineno, record in iter_records(lines, where):
            corpus = get_field(record, "corpus", str, where, lineno)
            unit_id = get_field(record, "unit_id", str, where, lineno)
            text = get_field(record, "text", str, where, lineno)
            raw_label = get_field(record, "raw_label", str, where, lineno, optional=True)
            granularity = get_field(record, "granularity", str, where, lineno, optional=True)
            if not text:
                raise IntegrityError(f"{where} line {lineno}: unit {unit_id!r} has empty text")
            if name is None:
                name = corpus
            elif corpus != name:
                raise IntegrityError(
                    f"{where} line {lineno}: mixed corpus names {name!r} and {corpus!r} in one file"
                )
            key = (corpus, unit_id)
            if key in seen:
                raise IntegrityError(f"{where} line {lineno}: duplicate unit id {unit_id!r} in corpus {corpus!r}")
            seen.add(key)
            units.append(
                CorpusUnit(corpus=corpus, unit_id=unit_id, text=text, raw_label=raw_label, granularity=granularity)
            )
    finally:
        if needs_close:
            lines.close()
    return Corpus(name=name or "", units=units)


def dump_corpus(corpus: Corpus) -> str:
    """Serialize a corpus back to its line-delimited form (round-trip safe)."""
    out = []
    for unit in corpus.units:
        record = {"corpus": unit.corpus, "unit_id": unit.unit_id, "text": unit.text}
        if unit.raw_label is not None:
            record["raw_label"] = unit.raw_label
        if unit.granularity is not None:
            record["granularity"] = unit.granularity
        out.append(dump_record(record))
    return "\n".join(out) + ("\n" if out else "")

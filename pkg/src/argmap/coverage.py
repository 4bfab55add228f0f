"""Label shortlisting, label-to-topic mappings, and coverage analytics.

Shortlisting runs each normalized corpus label as a BM25 query against the
topic index, giving a human curator a manageable candidate list.  The
curated mapping then drives three analytics: per-level mapping statistics,
the coverage curve (share of topics covered by at least n labels), and the
distribution of corpus units over mapped topics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .corpus import Corpus
from .errors import DegenerateLabelError, IntegrityError, ParseError
from .index import ScoredTopic, TopicIndex, bm25_score
from .jsonl import get_field, iter_records, open_lines
from .ontology import Ontology
from .textproc import NormalizationRules, normalize_label, tokenize

log = logging.getLogger(__name__)

SHORTLIST_DEPTH = 50

PROVENANCE_VALUES = ("manual", "auto")

MappingTarget = tuple[str, int, str]  # (ontology name, level, topic id)


@dataclass
class LabelMapping:
    """Curated normalized-label to ontology-topic assignments."""

    entries: dict[str, set[MappingTarget]] = field(default_factory=dict)
    provenance: dict[tuple[str, MappingTarget], str] = field(default_factory=dict)

    def add(self, label: str, target: MappingTarget, provenance: str = "manual") -> None:
        if provenance not in PROVENANCE_VALUES:
            raise ParseError(f"unknown provenance {provenance!r}")
        self.entries.setdefault(label, set()).add(target)
        self.provenance[(label, target)] = provenance

    def topics_for(self, label: str, ontology_name: str, level: int) -> set[str]:
        return {
            topic_id
            for (name, lvl, topic_id) in self.entries.get(label, ())
            if name == ontology_name and lvl == level
        }

    def labels_by_topic(self, ontology_name: str, level: int) -> dict[str, set[str]]:
        """topic id -> set of labels mapped to it at (ontology, level)."""
        result: dict[str, set[str]] = {}
        for label, targets in self.entries.items():
            for name, lvl, topic_id in targets:
                if name == ontology_name and lvl == level:
                    result.setdefault(topic_id, set()).add(label)
        return result


@dataclass(frozen=True)
class MappingStats:
    """Mapping summary for one (ontology, level): Table-style min/mean/max."""

    mapped_label_count: int
    covered_topic_count: int
    min_per_label: float
    mean_per_label: float
    max_per_label: float


@dataclass(frozen=True)
class CoverageCurve:
    """Proportion of level topics covered by at least n distinct labels."""

    ontology: str
    level: int
    points: dict[int, float]


@dataclass(frozen=True)
class UnitDistribution:
    """Unit counts per mapped topic, plus an explicit unmapped bucket."""

    ontology: str
    level: int
    counts: dict[str, int]
    unmapped: int


def shortlist_labels(
    labels: set[str],
    idx: TopicIndex,
    n: int = SHORTLIST_DEPTH,
) -> dict[str, list[ScoredTopic]]:
    """Top-n BM25 candidate topics per label; may return fewer than n."""
    return {label: bm25_score(idx, tokenize(label))[:n] for label in sorted(labels)}


def load_label_mapping(source, ontologies: dict[str, Ontology]) -> LabelMapping:
    """Load and validate a mapping file against the loaded ontologies.

    Records: {"label","ontology","level","topic_id","provenance"}.  Entries
    naming an ontology that is not loaded are kept but cannot be validated;
    entries naming a loaded ontology must resolve to a topic at the stated
    level.
    """
    lines, where, needs_close = open_lines(source)
    mapping = LabelMapping()
    offenders: list[str] = []
    try:
        for lineno, record in iter_records(lines, where):
            label = get_field(record, "label", str, where, lineno)
            ontology_name = get_field(record, "ontology", str, where, lineno)
            level = get_field(record, "level", int, where, lineno)
            topic_id = get_field(record, "topic_id", str, where, lineno)
            provenance = get_field(record, "provenance", str, where, lineno, optional=True) or "manual"
            if provenance not in PROVENANCE_VALUES:
                raise ParseError(f"{where} line {lineno}: unknown provenance {provenance!r}")
            ontology = ontologies.get(ontology_name)
            if ontology is None:
                log.debug("mapping entry for %r skips validation: ontology not loaded", ontology_name)
            else:
                topic = ontology.topics.get(topic_id)
                if topic is None:
                    offenders.append(f"line {lineno}: topic {topic_id!r} not in ontology {ontology_name!r}")
                    continue
                if topic.level != level:
                    offenders.append(
                        f"line {lineno}: topic {topic_id!r} is at level {topic.level}, entry says {level}"
                    )
                    continue
            mapping.add(label, (ontology_name, level, topic_id), provenance)
    finally:
        if needs_close:
            lines.close()
    if offenders:
        raise IntegrityError(f"{where}: unresolvable mapping entries: " + "; ".join(offenders))
    return mapping


def mapping_stats(
    mapping: LabelMapping,
    ontology: Ontology,
    level: int,
    all_labels: set[str],
) -> MappingStats:
    """Mapping statistics over ``all_labels`` for one (ontology, level)."""
    per_label_counts: list[int] = []
    covered: set[str] = set()
    for label in all_labels:
        topics = mapping.topics_for(label, ontology.name, level)
        if topics:
            per_label_counts.append(len(topics))
            covered.update(topics)
    if per_label_counts:
        return MappingStats(
            mapped_label_count=len(per_label_counts),
            covered_topic_count=len(covered),
            min_per_label=float(min(per_label_counts)),
            mean_per_label=sum(per_label_counts) / len(per_label_counts),
            max_per_label=float(max(per_label_counts)),
        )
    return MappingStats(0, 0, 0.0, 0.0, 0.0)


def coverage_curve(mapping: LabelMapping, ontology: Ontology, level: int) -> CoverageCurve:
    """point(n) = share of level topics mapped by at least n distinct labels."""
    level_topics = {t.id for t in ontology.topics_at_level(level)}
    topic_count = len(level_topics)
    by_topic = mapping.labels_by_topic(ontology.name, level)
    unknown = sorted(set(by_topic) - level_topics)
    if unknown:
        raise IntegrityError(f"mapping references topics not at {ontology.name!r} level {level}: {', '.join(unknown)}")
    label_counts = [len(labels) for labels in by_topic.values()]
    max_n = max(label_counts, default=0)
    points: dict[int, float] = {}
    for n in range(1, max(1, max_n) + 1):
        points[n] = sum(1 for c in label_counts if c >= n) / topic_count
    return CoverageCurve(ontology=ontology.name, level=level, points=points)


def unit_distribution(
    corpora: list[Corpus],
    mapping: LabelMapping,
    ontology: Ontology,
    level: int,
    rules: NormalizationRules,
) -> UnitDistribution:
    """Count each unit toward every topic its normalized label maps to.

    All corpora must be labeled.  A unit whose label has no mapping at
    (ontology, level) lands in the explicit unmapped bucket.
    """
    for corpus in corpora:
        if not corpus.labeled:
            raise IntegrityError(f"corpus {corpus.name!r} has unlabeled units; unit distribution requires labels")
    counts: dict[str, int] = {t.id: 0 for t in ontology.topics_at_level(level)}
    unmapped = 0
    for corpus in corpora:
        for unit in corpus.units:
            label = normalized_or_raw(unit.raw_label, rules)
            topics = mapping.topics_for(label, ontology.name, level)
            if not topics:
                unmapped += 1
                continue
            for topic_id in topics:
                if topic_id not in counts:
                    raise IntegrityError(
                        f"mapping sends label {label!r} to {topic_id!r}, "
                        f"which is not at {ontology.name!r} level {level}"
                    )
                counts[topic_id] += 1
    return UnitDistribution(ontology=ontology.name, level=level, counts=counts, unmapped=unmapped)


def normalized_or_raw(raw_label: str, rules: NormalizationRules) -> str:
    """Normalize a label, keeping the case-folded raw form when degenerate."""
    try:
        normalized, _ = normalize_label(raw_label, rules)
        return normalized
    except DegenerateLabelError:
        return " ".join(raw_label.casefold().split())

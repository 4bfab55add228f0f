"""Leveled topic DAGs with attached reference documents.

An ontology is a directed acyclic graph of topics.  Edges point from a
topic to its parents, which must sit on strictly smaller levels.  Documents
attach to topics; :func:`propagate_documents` copies each document to every
ancestor of its topic so that per-level statistics and per-topic
pseudo-documents include everything categorized below.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import IntegrityError, NotFoundError, ParseError, StateError
from .jsonl import get_field, iter_records, open_lines
from .textproc import tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Topic:
    """One node of the ontology graph."""

    id: str
    label: str
    level: int
    parent_ids: frozenset[str] = frozenset()


@dataclass(frozen=True)
class TopicDocument:
    """A reference document attached to a topic.

    ``token_count`` is derived from the text with the shared tokenizer;
    pass a negative value (the default) to have it computed.
    """

    topic_id: str
    doc_id: str
    text: str
    author: str | None = None
    token_count: int = -1

    def __post_init__(self):
        if self.token_count < 0:
            object.__setattr__(self, "token_count", len(tokenize(self.text)))


@dataclass(frozen=True)
class LevelStats:
    """Per-level summary over attached documents (post-propagation).

    ``mean_authors`` is None when no document at the level carries author
    metadata; it is never reported as zero in that case.
    """

    level: int
    topic_count: int
    mean_authors: float | None
    mean_docs: float
    mean_tokens: float


@dataclass
class Ontology:
    """Topics plus attached documents; immutable by convention after load."""

    name: str
    topics: dict[str, Topic]
    documents: list[TopicDocument]
    propagated: bool = False

    def topic(self, topic_id: str) -> Topic:
        try:
            return self.topics[topic_id]
        except KeyError:
            raise NotFoundError(f"ontology {self.name!r} has no topic {topic_id!r}") from None

    def levels(self) -> list[int]:
        return sorted({t.level for t in self.topics.values()})

    def topics_at_level(self, level: int) -> list[Topic]:
        """Topics at ``level``, ordered by id for reproducibility."""
        found = sorted((t for t in self.topics.values() if t.level == level), key=lambda t: t.id)
        if not found:
            raise NotFoundError(f"ontology {self.name!r} has no level {level}")
        return found

    def documents_by_topic(self) -> dict[str, list[TopicDocument]]:
        grouped: dict[str, list[TopicDocument]] = {tid: [] for tid in self.topics}
        for doc in self.documents:
            grouped[doc.topic_id].append(doc)
        return grouped

    def ancestors(self) -> dict[str, frozenset[str]]:
        """Transitive parents per topic, computed level-by-level."""
        result: dict[str, frozenset[str]] = {}
        for topic in sorted(self.topics.values(), key=lambda t: t.level):
            acc: set[str] = set()
            for pid in topic.parent_ids:
                acc.add(pid)
                acc.update(result[pid])
            result[topic.id] = frozenset(acc)
        return result


def _check_acyclic(topics: dict[str, Topic], name: str) -> None:
    # Kahn's algorithm on the child->parent edges; independent of the level
    # rule so cycles are caught even when levels are inconsistent.
    pending = {tid: len(t.parent_ids) for tid, t in topics.items()}
    children: dict[str, list[str]] = {tid: [] for tid in topics}
    for tid, topic in topics.items():
        for pid in topic.parent_ids:
            children[pid].append(tid)
    queue = [tid for tid, n in pending.items() if n == 0]
    seen = 0
    while queue:
        current = queue.pop()
        seen += 1
        for child in children[current]:
            pending[child] -= 1
            if pending[child] == 0:
                queue.append(child)
    if seen != len(topics):
        stuck = sorted(tid for tid, n in pending.items() if n > 0)
        raise IntegrityError(f"ontology {name!r} has a parent cycle involving: {', '.join(stuck)}")


def _validate(ontology: Ontology) -> None:
    if not ontology.topics:
        raise IntegrityError("ontology has no topics")
    for topic in ontology.topics.values():
        for pid in topic.parent_ids:
            parent = ontology.topics.get(pid)
            if parent is None:
                raise IntegrityError(
                    f"topic {topic.id!r} references unknown parent {pid!r}"
                )
    _check_acyclic(ontology.topics, ontology.name)
    for topic in ontology.topics.values():
        for pid in topic.parent_ids:
            parent = ontology.topics[pid]
            if parent.level >= topic.level:
                raise IntegrityError(
                    f"topic {topic.id!r} (level {topic.level}) has parent {pid!r} "
                    f"at level {parent.level}; parents must sit on strictly smaller levels"
                )
    for doc in ontology.documents:
        if doc.topic_id not in ontology.topics:
            raise IntegrityError(f"document {doc.doc_id!r} attached to unknown topic {doc.topic_id!r}")


def load_ontology(source, name: str | None = None) -> Ontology:
    """Load an ontology from line-delimited JSON records.

    Topic records: {"kind":"topic","id","label","level","parents":[...]}.
    Document records: {"kind":"doc","topic_id","doc_id","text","author"?}.
    Records may appear in any order; loading is two-pass.
    """
    lines, where, needs_close = open_lines(source)
    if name is None:
        name = Path(where).stem
    topic_rows: list[tuple[int, dict]] = []
    doc_rows: list[tuple[int, dict]] = []
    try:
        for lineno, record in iter_records(lines, where):
            kind = get_field(record, "kind", str, where, lineno)
            if kind == "topic":
                topic_rows.append((lineno, record))
            elif kind == "doc":
                doc_rows.append((lineno, record))
            else:
                raise ParseError(f"{where} line {lineno}: unknown record kind {kind!r}")
    finally:
        if needs_close:
            lines.close()

    topics: dict[str, Topic] = {}
    for lineno, record in topic_rows:
        topic_id = get_field(record, "id", str, where, lineno)
        label = get_field(record, "label", str, where, lineno)
        level = get_field(record, "level", int, where, lineno)
        parents = get_field(record, "parents", list, where, lineno, optional=True) or []
        if not all(isinstance(p, str) for p in parents):
            raise ParseError(f"{where} line {lineno}: field 'parents' must be a list of strings")
        if level < 1:
            raise IntegrityError(f"{where} line {lineno}: topic {topic_id!r} has level {level}; levels start at 1")
        if topic_id in topics:
            raise IntegrityError(f"{where} line {lineno}: duplicate topic id {topic_id!r}")
        topics[topic_id] = Topic(id=topic_id, label=label, level=level, parent_ids=frozenset(parents))

    documents: list[TopicDocument] = []
    for lineno, record in doc_rows:
        documents.append(
            TopicDocument(
                topic_id=get_field(record, "topic_id", str, where, lineno),
                doc_id=get_field(record, "doc_id", str, where, lineno),
                text=get_field(record, "text", str, where, lineno),
                author=get_field(record, "author", str, where, lineno, optional=True),
            )
        )

    ontology = Ontology(name=name, topics=topics, documents=documents, propagated=False)
    _validate(ontology)
    return ontology


def propagate_documents(ontology: Ontology) -> Ontology:
    """Return a new ontology where every document is also attached to each
    ancestor of its topic, deduplicated by (ancestor id, doc id).

    The input must not already be propagated; its attachments are unchanged.
    """
    if ontology.propagated:
        raise StateError(f"ontology {ontology.name!r} is already propagated")
    ancestors = ontology.ancestors()
    attached = {(doc.topic_id, doc.doc_id) for doc in ontology.documents}
    documents = list(ontology.documents)
    for doc in ontology.documents:
        for ancestor_id in sorted(ancestors[doc.topic_id]):
            key = (ancestor_id, doc.doc_id)
            if key in attached:
                continue
            attached.add(key)
            documents.append(replace(doc, topic_id=ancestor_id))
    return Ontology(
        name=ontology.name,
        topics=ontology.topics,
        documents=documents,
        propagated=True,
    )


def level_stats(ontology: Ontology, level: int) -> LevelStats:
    """Per-level document statistics; requires a propagated ontology."""
    if not ontology.propagated:
        raise StateError("level statistics require a propagated ontology")
    level_topics = ontology.topics_at_level(level)
    grouped = ontology.documents_by_topic()
    doc_counts = []
    token_counts = []
    author_counts = []
    any_author = False
    for topic in level_topics:
        docs = grouped[topic.id]
        doc_counts.append(len(docs))
        token_counts.append(sum(d.token_count for d in docs))
        authors = {d.author for d in docs if d.author is not None}
        if authors:
            any_author = True
        author_counts.append(len(authors))
    count = len(level_topics)
    return LevelStats(
        level=level,
        topic_count=count,
        mean_authors=sum(author_counts) / count if any_author else None,
        mean_docs=sum(doc_counts) / count,
        mean_tokens=sum(token_counts) / count,
    )

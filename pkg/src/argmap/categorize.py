"""Unit categorization approaches and aboutness policies.

Three ways to relate a corpus unit to ontology topics: a case-insensitive
substring baseline, cosine similarity of TF-IDF vectors against each
topic's pseudo-document, and cosine similarity of averaged token
embeddings.  Scores are converted to Boolean aboutness labels by a
threshold or a top-k policy.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .corpus import CorpusUnit
from .errors import ConfigError, ParseError
from .index import ScoredTopic, TopicIndex, tfidf_cosine_scores
from .jsonl import open_lines
from .ontology import Topic
from .textproc import TokenSeq, tokenize

SENTENCE_SAMPLE_CAP = 10_000

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


@dataclass
class EmbeddingTable:
    """Precomputed static token vectors (the pluggable vector provider)."""

    dimension: int
    vectors: dict[str, np.ndarray]


@dataclass(frozen=True)
class TopicEmbedding:
    """A topic's averaged embedding and how many sentences fed it."""

    topic_id: str
    vector: np.ndarray
    sampled_sentences: int


@dataclass(frozen=True)
class AboutnessPolicy:
    """Converts ranked scores to Boolean aboutness labels.

    Exactly one of ``theta`` (threshold kind, strict ``score > theta``) or
    ``k`` (top-k kind) is set.
    """

    kind: str
    theta: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind == "threshold":
            if self.theta is None or self.k is not None:
                raise ConfigError("threshold policy requires theta and no k")
        elif self.kind == "top_k":
            if self.k is None or self.theta is not None:
                raise ConfigError("top_k policy requires k and no theta")
            if self.k < 1:
                raise ConfigError(f"top_k policy requires k >= 1, got {self.k}")
        else:
            raise ConfigError(f"unknown policy kind {self.kind!r}")

    @classmethod
    def threshold(cls, theta: float) -> "AboutnessPolicy":
        return cls(kind="threshold", theta=theta)

    @classmethod
    def top_k(cls, k: int) -> "AboutnessPolicy":
        return cls(kind="top_k", k=k)

    @classmethod
    def parse(cls, spec: str) -> "AboutnessPolicy":
        """Parse a CLI policy spec: ``threshold:0.05`` or ``topk:12``."""
        kind, _, value = spec.partition(":")
        try:
            if kind == "threshold":
                return cls.threshold(float(value))
            if kind in ("topk", "top_k"):
                return cls.top_k(int(value))
        except ValueError as exc:
            raise ConfigError(f"invalid policy parameter in {spec!r}") from exc
        raise ConfigError(f"unknown policy spec {spec!r}; expected threshold:<theta> or topk:<k>")

    def describe(self) -> tuple[str, str]:
        """(kind, parameter) strings for reports."""
        if self.kind == "threshold":
            return "threshold", f"{self.theta:g}"
        return "top_k", str(self.k)


def load_embedding_table(source) -> EmbeddingTable:
    """Load a word-vector text file: one ``token v1 .. vd`` line per token.

    An optional first line ``token_count dimension`` is accepted.
    """
    lines, where, needs_close = open_lines(source)
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    try:
        for lineno, line in enumerate(lines, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    dimension = int(parts[1])
                    continue
            token, *values = parts
            try:
                vector = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"{where} line {lineno}: non-numeric vector component") from exc
            if vector.size == 0:
                raise ParseError(f"{where} line {lineno}: token {token!r} has no vector components")
            if dimension is None:
                dimension = vector.size
            elif vector.size != dimension:
                raise ParseError(
                    f"{where} line {lineno}: token {token!r} has {vector.size} components, expected {dimension}"
                )
            vectors[token] = vector
    finally:
        if needs_close:
            lines.close()
    if dimension is None:
        raise ParseError(f"{where}: embedding table is empty")
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def direct_match(unit: CorpusUnit, topics: Iterable[Topic]) -> set[str]:
    """Topics whose label occurs, case-insensitively, inside the unit text."""
    haystack = unit.text.casefold()
    return {t.id for t in topics if t.label.casefold() in haystack}


def semantic_interpretation(unit: CorpusUnit, idx: TopicIndex) -> list[ScoredTopic]:
    """Cosine of TF-IDF vectors for the unit and each topic pseudo-document."""
    return tfidf_cosine_scores(idx, tokenize(unit.text))


def embed_text(tokens: TokenSeq, table: EmbeddingTable) -> np.ndarray:
    """Dimension-wise average over the vectors of covered token occurrences.

    Tokens absent from the table are skipped; the zero vector is returned
    when no token is covered.
    """
    covered = [table.vectors[t] for t in tokens if t in table.vectors]
    if not covered:
        return np.zeros(table.dimension, dtype=np.float64)
    return np.mean(covered, axis=0)


def split_sentences(text: str) -> list[str]:
    """Split on '.', '!' or '?' followed by whitespace."""
    return [s for s in _SENTENCE_SPLIT_RE.split(text.strip()) if s.strip()]


def topic_embedding(
    topic_id: str,
    pseudo_document: str,
    table: EmbeddingTable,
    cap: int = SENTENCE_SAMPLE_CAP,
    seed: int = 0,
) -> TopicEmbedding:
    """Embed a topic's pseudo-document, sampling at most ``cap`` sentences.

    Sampling is without replacement from the seeded generator, so the same
    seed always yields the same vector.
    """
    if cap < 1:
        raise ConfigError(f"sentence cap must be >= 1, got {cap}")
    sentences = split_sentences(pseudo_document)
    if len(sentences) > cap:
        rng = random.Random(seed)
        sentences = rng.sample(sentences, cap)
    vector = embed_text(tokenize(" ".join(sentences)), table)
    return TopicEmbedding(topic_id=topic_id, vector=vector, sampled_sentences=len(sentences))


def derive_seed(root_seed: int, key: str) -> int:
    """Stable per-consumer seed derived from the run's root seed."""
    digest = hashlib.sha256(f"{root_seed}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _dense_cosine(u: np.ndarray, v: np.ndarray) -> float:
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (norm_u * norm_v)


def text2vec_si(
    unit: CorpusUnit,
    topic_embeddings: list[TopicEmbedding],
    table: EmbeddingTable,
) -> list[ScoredTopic]:
    """Cosine of the unit's averaged embedding against each topic vector.

    Negative cosines are clamped to 0 so scores stay non-negative; every
    topic appears in the output, zero scores included.
    """
    for te in topic_embeddings:
        if te.vector.shape != (table.dimension,):
            raise ConfigError(
                f"topic {te.topic_id!r} embedding has dimension {te.vector.shape}, expected ({table.dimension},)"
            )
    unit_vec = embed_text(tokenize(unit.text), table)
    scored = [
        ScoredTopic(te.topic_id, max(0.0, _dense_cosine(unit_vec, te.vector)))
        for te in topic_embeddings
    ]
    scored.sort(key=lambda st: (-st.score, st.topic_id))
    return scored


def apply_policy(scored: list[ScoredTopic], policy: AboutnessPolicy) -> set[str]:
    """Boolean aboutness labels from a descending-ranked score list."""
    if policy.kind == "threshold":
        return {st.topic_id for st in scored if st.score > policy.theta}
    return {st.topic_id for st in scored[: policy.k]}

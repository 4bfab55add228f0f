"""Inverted index over per-topic pseudo-documents with BM25 and TF-IDF.

Each topic at the chosen level becomes one pseudo-document: the
concatenation of every document attached to it (documents sorted by doc id
for reproducibility).  BM25 uses the +0.5-smoothed log idf; the TF-IDF
cosine route uses plain ln(N/df).  Ties are broken by ascending topic id
everywhere so repeated scoring yields byte-identical rankings.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
import pickle
import tempfile
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, ParseError, StateError
from .ontology import Ontology
from .textproc import TokenSeq, tokenize

log = logging.getLogger(__name__)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

# Units used as queries can be whole essays or debates; cap query length to
# bound memory on degenerate inputs.
QUERY_TOKEN_CAP = 10_000

SparseVector = dict[str, float]

_CACHE_MAGIC = b"ARGMAP-INDEX\x00"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class ScoredTopic:
    """A topic id with a finite, non-negative similarity score."""

    topic_id: str
    score: float


@dataclass
class TopicIndex:
    """Immutable index statistics; safe for concurrent scoring."""

    topic_ids: list[str]
    doc_len: list[int]
    avg_doc_len: float
    df: dict[str, int]
    postings: dict[str, list[tuple[int, int]]]
    n_topics: int
    bm25_k1: float
    bm25_b: float
    tfidf_norms: list[float]

    def ordinal(self, topic_id: str) -> int:
        return self.topic_ids.index(topic_id)


def pseudo_documents(ontology: Ontology, level: int) -> dict[str, str]:
    """Concatenated attached documents per topic at ``level``.

    Requires a propagated ontology so that lower-level documents are
    included.  Topics are keyed in ascending id order; documents are
    concatenated in ascending doc id order.
    """
    if not ontology.propagated:
        raise StateError("indexing requires a propagated ontology")
    grouped = ontology.documents_by_topic()
    result: dict[str, str] = {}
    for topic in ontology.topics_at_level(level):
        docs = sorted(grouped[topic.id], key=lambda d: d.doc_id)
        result[topic.id] = "\n".join(d.text for d in docs)
    return result


def build_index(
    ontology: Ontology,
    level: int,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> TopicIndex:
    """Build the inverted index over the level's topic pseudo-documents."""
    if not k1 > 0:
        raise ConfigError(f"bm25 k1 must be > 0, got {k1}")
    if not 0 <= b <= 1:
        raise ConfigError(f"bm25 b must be in [0, 1], got {b}")
    pdocs = pseudo_documents(ontology, level)
    topic_ids = list(pdocs)
    doc_len: list[int] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    token_lists: list[TokenSeq] = []
    for ordinal, topic_id in enumerate(topic_ids):
        tokens = tokenize(pdocs[topic_id])
        token_lists.append(tokens)
        doc_len.append(len(tokens))
        if not tokens:
            log.warning("topic %r has no tokens at level %d; it will score 0 for every query", topic_id, level)
        for term, tf in sorted(Counter(tokens).items()):
            postings.setdefault(term, []).append((ordinal, tf))
    df = {term: len(rows) for term, rows in postings.items()}
    n_topics = len(topic_ids)
    avg_doc_len = sum(doc_len) / n_topics if n_topics else 0.0
    tfidf_norms = []
    for ordinal, tokens in enumerate(token_lists):
        acc = 0.0
        for term, tf in Counter(tokens).items():
            idf = math.log(n_topics / df[term])
            acc += (tf * idf) ** 2
        tfidf_norms.append(math.sqrt(acc))
    return TopicIndex(
        topic_ids=topic_ids,
        doc_len=doc_len,
        avg_doc_len=avg_doc_len,
        df=df,
        postings=dict(sorted(postings.items())),
        n_topics=n_topics,
        bm25_k1=k1,
        bm25_b=b,
        tfidf_norms=tfidf_norms,
    )


def _cap_query(query: TokenSeq) -> TokenSeq:
    if len(query) > QUERY_TOKEN_CAP:
        log.warning("query truncated from %d to %d tokens", len(query), QUERY_TOKEN_CAP)
        return query[:QUERY_TOKEN_CAP]
    return query


def _ranked(scores: dict[int, float], topic_ids: list[str]) -> list[ScoredTopic]:
    ranked = [ScoredTopic(topic_ids[o], s) for o, s in scores.items() if s > 0.0]
    ranked.sort(key=lambda st: (-st.score, st.topic_id))
    return ranked


def bm25_idf(n_topics: int, df: int) -> float:
    return math.log(1.0 + (n_topics - df + 0.5) / (df + 0.5))


def bm25_score(idx: TopicIndex, query: TokenSeq) -> list[ScoredTopic]:
    """Rank topics for ``query`` by BM25; zero-score topics are omitted.

    Query-side term frequency multiplies each term's contribution.
    """
    query = _cap_query(query)
    k1, b = idx.bm25_k1, idx.bm25_b
    scores: dict[int, float] = {}
    for term, qtf in sorted(Counter(query).items()):
        rows = idx.postings.get(term)
        if not rows:
            continue
        idf = bm25_idf(idx.n_topics, idx.df[term])
        for ordinal, tf in rows:
            norm = k1 * (1.0 - b + b * idx.doc_len[ordinal] / idx.avg_doc_len)
            contribution = idf * tf * (k1 + 1.0) / (tf + norm)
            scores[ordinal] = scores.get(ordinal, 0.0) + qtf * contribution
    return _ranked(scores, idx.topic_ids)


def tfidf_vector(idx: TopicIndex, tokens: TokenSeq) -> SparseVector:
    """TF-IDF vector of ``tokens`` over the index vocabulary.

    Components use plain ln(N/df); terms present in every topic get weight
    zero and are dropped from the sparse representation.
    """
    tokens = _cap_query(tokens)
    vector: SparseVector = {}
    for term, tf in sorted(Counter(tokens).items()):
        df = idx.df.get(term)
        if df is None or df >= idx.n_topics:
            continue
        vector[term] = tf * math.log(idx.n_topics / df)
    return vector


def topic_tfidf_vector(idx: TopicIndex, topic_id: str) -> SparseVector:
    """TF-IDF vector of one topic's pseudo-document (for oracle parity)."""
    ordinal = idx.ordinal(topic_id)
    vector: SparseVector = {}
    for term, rows in idx.postings.items():
        df = idx.df[term]
        if df >= idx.n_topics:
            continue
        for o, tf in rows:
            if o == ordinal:
                vector[term] = tf * math.log(idx.n_topics / df)
                break
    return vector


def cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine similarity of two sparse vectors; 0 when either norm is 0."""
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    norm_u = math.sqrt(sum(w * w for w in u.values()))
    norm_v = math.sqrt(sum(w * w for w in v.values()))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return dot / (norm_u * norm_v)


def tfidf_cosine_scores(idx: TopicIndex, tokens: TokenSeq) -> list[ScoredTopic]:
    """Cosine of the query's TF-IDF vector against every topic's.

    Equivalent to pairing :func:`tfidf_vector` with
    :func:`topic_tfidf_vector` and :func:`cosine` per topic, but walks the
    postings once.  Zero-score topics are omitted.
    """
    query_vec = tfidf_vector(idx, tokens)
    if not query_vec:
        return []
    query_norm = math.sqrt(sum(w * w for w in query_vec.values()))
    dots: dict[int, float] = {}
    for term, weight in query_vec.items():
        df = idx.df[term]
        idf = math.log(idx.n_topics / df)
        for ordinal, tf in idx.postings[term]:
            dots[ordinal] = dots.get(ordinal, 0.0) + weight * tf * idf
    scores: dict[int, float] = {}
    for ordinal, dot in dots.items():
        topic_norm = idx.tfidf_norms[ordinal]
        if topic_norm == 0.0:
            continue
        scores[ordinal] = dot / (query_norm * topic_norm)
    return _ranked(scores, idx.topic_ids)


def cache_fingerprint(source_digest: str, level: int, k1: float, b: float) -> str:
    """Fingerprint binding an index cache to its inputs and parameters."""
    payload = f"{_CACHE_VERSION}|{source_digest}|{level}|{k1!r}|{b!r}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def save_index(idx: TopicIndex, path, fingerprint: str) -> None:
    """Write the private, versioned binary cache (atomic: temp + rename)."""
    path = Path(path)
    payload = pickle.dumps({"fingerprint": fingerprint, "index": idx}, protocol=pickle.HIGHEST_PROTOCOL)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(_CACHE_MAGIC)
            handle.write(_CACHE_VERSION.to_bytes(2, "big"))
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_index(path, expected_fingerprint: str | None = None) -> TopicIndex:
    """Load a cached index, verifying magic, version, and fingerprint."""
    path = Path(path)
    blob = path.read_bytes()
    if not blob.startswith(_CACHE_MAGIC):
        raise ParseError(f"{path.name}: not an index cache (bad magic)")
    offset = len(_CACHE_MAGIC)
    version = int.from_bytes(blob[offset : offset + 2], "big")
    if version != _CACHE_VERSION:
        raise ConfigError(f"{path.name}: index cache version {version} is not supported")
    data = pickle.loads(blob[offset + 2 :])
    if expected_fingerprint is not None and data["fingerprint"] != expected_fingerprint:
        raise ConfigError(f"{path.name}: index cache is stale (parameters or corpus changed)")
    return data["index"]

"""argmap: map argumentative text corpora onto topic ontologies.

Index per-topic reference documents, categorize argument units into
ontology topics, compute topic-coverage analytics, and evaluate
categorization against pooled human judgments collected through the
bundled annotation service.
"""

from .categorize import (
    AboutnessPolicy,
    EmbeddingTable,
    TopicEmbedding,
    apply_policy,
    direct_match,
    embed_text,
    load_embedding_table,
    semantic_interpretation,
    text2vec_si,
    topic_embedding,
)
from .corpus import Corpus, CorpusUnit, dump_corpus, load_corpus
from .coverage import (
    CoverageCurve,
    LabelMapping,
    MappingStats,
    UnitDistribution,
    coverage_curve,
    load_label_mapping,
    mapping_stats,
    shortlist_labels,
    unit_distribution,
)
from .errors import (
    ArgmapError,
    ConfigError,
    DegenerateLabelError,
    IntegrityError,
    MetricUndefinedError,
    NotFoundError,
    ParseError,
    StateError,
)
from .evaluation import (
    PRF,
    Judgment,
    Pool,
    build_pool,
    gold_from_judgments,
    krippendorff_alpha,
    load_judgments,
    prf,
    sweep_policy,
)
from .index import (
    ScoredTopic,
    TopicIndex,
    bm25_score,
    build_index,
    cosine,
    tfidf_vector,
)
from .ontology import (
    LevelStats,
    Ontology,
    Topic,
    TopicDocument,
    level_stats,
    load_ontology,
    propagate_documents,
)
from .textproc import LabelType, NormalizationRules, default_rules, normalize_label, tokenize

__version__ = "0.1.0"

__all__ = [
    "AboutnessPolicy",
    "ArgmapError",
    "ConfigError",
    "Corpus",
    "CorpusUnit",
    "CoverageCurve",
    "DegenerateLabelError",
    "EmbeddingTable",
    "IntegrityError",
    "Judgment",
    "LabelMapping",
    "LabelType",
    "LevelStats",
    "MappingStats",
    "MetricUndefinedError",
    "NormalizationRules",
    "NotFoundError",
    "Ontology",
    "ParseError",
    "Pool",
    "PRF",
    "ScoredTopic",
    "StateError",
    "Topic",
    "TopicDocument",
    "TopicEmbedding",
    "TopicIndex",
    "UnitDistribution",
    "apply_policy",
    "bm25_score",
    "build_index",
    "build_pool",
    "cosine",
    "coverage_curve",
    "default_rules",
    "direct_match",
    "dump_corpus",
    "embed_text",
    "gold_from_judgments",
    "krippendorff_alpha",
    "level_stats",
    "load_corpus",
    "load_embedding_table",
    "load_judgments",
    "load_label_mapping",
    "load_ontology",
    "mapping_stats",
    "normalize_label",
    "prf",
    "propagate_documents",
    "semantic_interpretation",
    "shortlist_labels",
    "sweep_policy",
    "text2vec_si",
    "tfidf_vector",
    "tokenize",
    "topic_embedding",
    "unit_distribution",
]

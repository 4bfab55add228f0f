"""Pooled evaluation of categorization approaches.

Judged pairs come from a pool: per unit, the union of every approach's
top-ranked topics.  Gold labels aggregate per-pair assessor votes by strict
majority.  Effectiveness is micro-averaged precision/recall/F1 over pooled
pairs, and agreement is Krippendorff's alpha over the coincidence matrix of
items with at least two judgments.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone

from .categorize import AboutnessPolicy, apply_policy
from .errors import ConfigError, IntegrityError, MetricUndefinedError, ParseError
from .index import ScoredTopic
from .jsonl import dump_record, get_field, iter_records, open_lines

log = logging.getLogger(__name__)

POOL_DEPTH = 5

# unit id -> ranked ScoredTopic list, one map per approach
Rankings = "dict[str, dict[str, list[ScoredTopic]]]"


@dataclass(frozen=True)
class Judgment:
    """One assessor's aboutness call on a (unit, topic) pair."""

    assessor: str
    unit_id: str
    topic_id: str
    about: bool
    timestamp: datetime

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.assessor, self.unit_id, self.topic_id)

    def to_record(self) -> dict:
        return {
            "assessor": self.assessor,
            "unit_id": self.unit_id,
            "topic_id": self.topic_id,
            "about": self.about,
            "timestamp": self.timestamp.isoformat(),
        }


@dataclass
class Pool:
    """Per-unit topic sets eligible for judgment."""

    topics_by_unit: dict[str, frozenset[str]]

    def pairs(self) -> list[tuple[str, str]]:
        return [(u, t) for u in sorted(self.topics_by_unit) for t in sorted(self.topics_by_unit[u])]

    @property
    def total_pairs(self) -> int:
        return sum(len(ts) for ts in self.topics_by_unit.values())

    def __contains__(self, pair: tuple[str, str]) -> bool:
        unit_id, topic_id = pair
        return topic_id in self.topics_by_unit.get(unit_id, ())


@dataclass(frozen=True)
class PRF:
    """Micro-averaged precision/recall/F1 with the underlying counts."""

    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0


def parse_judgment(record: dict, where: str, lineno: int) -> Judgment:
    raw_ts = get_field(record, "timestamp", str, where, lineno, optional=True)
    if raw_ts is None:
        timestamp = datetime.fromtimestamp(0, tz=timezone.utc)
    else:
        try:
            timestamp = datetime.fromisoformat(raw_ts)
        except ValueError as exc:
            raise ParseError(f"{where} line {lineno}: invalid timestamp {raw_ts!r}") from exc
    return Judgment(
        assessor=get_field(record, "assessor", str, where, lineno),
        unit_id=get_field(record, "unit_id", str, where, lineno),
        topic_id=get_field(record, "topic_id", str, where, lineno),
        about=get_field(record, "about", bool, where, lineno),
        timestamp=timestamp,
    )


def load_judgments(source) -> list[Judgment]:
    """Load judgments, applying latest-record-wins per (assessor, unit, topic)."""
    lines, where, needs_close = open_lines(source)
    latest: dict[tuple[str, str, str], Judgment] = {}
    try:
        for lineno, record in iter_records(lines, where):
            judgment = parse_judgment(record, where, lineno)
            latest[judgment.key] = judgment
    finally:
        if needs_close:
            lines.close()
    return list(latest.values())


def dump_judgments(judgments: list[Judgment], header: str = "") -> str:
    """Serialize judgments sorted by key, with an optional header comment."""
    out = [f"# {header}"] if header else []
    for judgment in sorted(judgments, key=lambda j: j.key):
        out.append(dump_record(judgment.to_record()))
    return "\n".join(out) + "\n"


def build_pool(rankings: dict[str, dict[str, list[ScoredTopic]]], depth: int = POOL_DEPTH) -> Pool:
    """Per-unit union of each approach's top-``depth`` topics.

    Every approach must rank the same unit set.
    """
    if not rankings:
        return Pool({})
    unit_sets = {name: frozenset(by_unit) for name, by_unit in rankings.items()}
    reference = next(iter(unit_sets.values()))
    for name, units in unit_sets.items():
        if units != reference:
            raise IntegrityError(
                f"approach {name!r} ranks a different unit set than the others; pooling requires identical coverage"
            )
    pool: dict[str, frozenset[str]] = {}
    for unit_id in sorted(reference):
        topics: set[str] = set()
        for by_unit in rankings.values():
            topics.update(st.topic_id for st in by_unit[unit_id][:depth])
        pool[unit_id] = frozenset(topics)
    return Pool(pool)


def gold_from_judgments(
    judgments: list[Judgment],
    rule: str = "majority",
    pool: Pool | None = None,
) -> dict[str, set[str]]:
    """Aggregate votes to gold aboutness: strict majority, ties not-about.

    When a pool is given, pooled pairs without any judgment are reported in
    a coverage warning.
    """
    if rule != "majority":
        raise ConfigError(f"unknown aggregation rule {rule!r}")
    latest: dict[tuple[str, str, str], bool] = {}
    for judgment in judgments:
        latest[judgment.key] = judgment.about
    votes: dict[tuple[str, str], list[bool]] = {}
    for (_, unit_id, topic_id), about in latest.items():
        votes.setdefault((unit_id, topic_id), []).append(about)
    gold: dict[str, set[str]] = {}
    for (unit_id, topic_id), pair_votes in votes.items():
        if sum(pair_votes) * 2 > len(pair_votes):
            gold.setdefault(unit_id, set()).add(topic_id)
    if pool is not None:
        unjudged = [pair for pair in pool.pairs() if pair not in votes]
        if unjudged:
            shown = ", ".join(f"{u}/{t}" for u, t in unjudged[:20])
            more = f" (+{len(unjudged) - 20} more)" if len(unjudged) > 20 else ""
            log.warning("%d pooled pairs have no judgment: %s%s", len(unjudged), shown, more)
    return gold


def prf(
    predicted: dict[str, set[str]],
    gold: dict[str, set[str]],
    pool: Pool,
) -> PRF:
    """Micro-averaged P/R/F1 over pooled pairs; pairs outside the pool are ignored."""
    if pool.total_pairs == 0:
        raise MetricUndefinedError("cannot compute precision/recall over an empty pool")
    tp = fp = fn = 0
    for unit_id, topics in pool.topics_by_unit.items():
        predicted_here = predicted.get(unit_id, set())
        gold_here = gold.get(unit_id, set())
        for topic_id in topics:
            is_predicted = topic_id in predicted_here
            is_gold = topic_id in gold_here
            if is_predicted and is_gold:
                tp += 1
            elif is_predicted:
                fp += 1
            elif is_gold:
                fn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PRF(precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn)


def krippendorff_alpha(judgments: list[Judgment]) -> float:
    """Krippendorff's alpha for nominal binary data with missing judgments.

    Items are (unit, topic) pairs; only items with at least two judgments
    enter the coincidence matrix.  Perfect agreement yields exactly 1.0.
    """
    if len(judgments) < 2:
        raise MetricUndefinedError("alpha requires at least two judgments")
    latest: dict[tuple[str, str, str], bool] = {}
    for judgment in judgments:
        latest[judgment.key] = judgment.about
    items: dict[tuple[str, str], list[bool]] = {}
    for (_, unit_id, topic_id), about in latest.items():
        items.setdefault((unit_id, topic_id), []).append(about)
    pairable = [values for values in items.values() if len(values) >= 2]
    if not pairable:
        raise MetricUndefinedError("alpha requires at least one item with two or more judgments")

    # Coincidence matrix over the two nominal values; o[a][b] accumulates
    # ordered pairs from the same item, weighted by 1/(m-1).
    o = {True: {True: 0.0, False: 0.0}, False: {True: 0.0, False: 0.0}}
    for values in pairable:
        m = len(values)
        counts = Counter(values)
        for a in (True, False):
            for b in (True, False):
                pairs = counts[a] * (counts[b] - 1) if a == b else counts[a] * counts[b]
                o[a][b] += pairs / (m - 1)
    n = sum(o[a][b] for a in (True, False) for b in (True, False))
    n_true = o[True][True] + o[True][False]
    n_false = o[False][True] + o[False][False]
    observed = (o[True][False] + o[False][True]) / n
    expected = (2 * n_true * n_false) / (n * (n - 1))
    if observed == 0.0:
        return 1.0
    return 1.0 - observed / expected


DEFAULT_THRESHOLD_GRID = tuple(i / 100 for i in range(0, 101))


def sweep_policy(
    scored: dict[str, list[ScoredTopic]],
    gold: dict[str, set[str]],
    pool: Pool,
    family: str,
    grid: tuple[float, ...] = DEFAULT_THRESHOLD_GRID,
    k_max: int | None = None,
) -> tuple[AboutnessPolicy, PRF]:
    """Find the policy parameter maximizing F1 on the pooled judgments.

    ``family`` is "threshold" (swept over ``grid``) or "top_k" (swept over
    1..k_max, defaulting to the longest ranking).  Ties prefer fewer
    predicted labels: larger theta, smaller k.
    """
    if family == "threshold":
        if not grid:
            raise ConfigError("threshold sweep requires a non-empty grid")
        candidates = [AboutnessPolicy.threshold(theta) for theta in sorted(set(grid), reverse=True)]
    elif family == "top_k":
        if k_max is None:
            k_max = max((len(s) for s in scored.values()), default=1) or 1
        if k_max < 1:
            raise ConfigError(f"top_k sweep requires k_max >= 1, got {k_max}")
        candidates = [AboutnessPolicy.top_k(k) for k in range(1, k_max + 1)]
    else:
        raise ConfigError(f"unknown policy family {family!r}")

    best: tuple[AboutnessPolicy, PRF] | None = None
    for policy in candidates:
        predicted = {unit_id: apply_policy(ranked, policy) for unit_id, ranked in scored.items()}
        result = prf(predicted, gold, pool)
        if best is None or result.f1 > best[1].f1:
            best = (policy, result)
    return best

"""Command-line pipeline over the toolkit.

One verb per pipeline stage: ``ingest-check``, ``index``, ``shortlist``,
``categorize``, ``coverage``, ``evaluate``, ``sweep``, ``serve``.  All
outputs are written atomically (temp file + rename) into the --out
directory; identical configuration and inputs produce byte-identical
output files.  Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import categorize as cat
from . import coverage as cov
from . import evaluation as ev
from .corpus import Corpus, CorpusUnit, load_corpus
from .errors import ArgmapError, ConfigError, NotFoundError, ParseError
from .index import (
    DEFAULT_B,
    DEFAULT_K1,
    ScoredTopic,
    TopicIndex,
    build_index,
    cache_fingerprint,
    file_digest,
    load_index,
    pseudo_documents,
    save_index,
)
from .ontology import Ontology, load_ontology, propagate_documents
from .textproc import NormalizationRules, default_rules, load_rules

log = logging.getLogger(__name__)

RANKINGS_COLUMNS = ["approach", "ontology", "level", "unit_id", "topic_id", "rank", "score"]


class UsageError(Exception):
    """Raised for bad command lines; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """Validated run configuration: input paths exist before work starts."""

    ontology_paths: tuple[Path, ...] = ()
    corpus_paths: tuple[Path, ...] = ()
    mapping_path: Path | None = None
    embeddings_path: Path | None = None
    rankings_path: Path | None = None
    judgments_path: Path | None = None
    rules_path: Path | None = None
    index_path: Path | None = None
    level: int | None = None
    bm25_k1: float = DEFAULT_K1
    bm25_b: float = DEFAULT_B
    policy: cat.AboutnessPolicy | None = None
    seed: int = 0
    threads: int = 4
    top: int = 50
    out_dir: Path = Path(".")

    @classmethod
    def from_args(cls, args: argparse.Namespace, judgments_is_output: bool = False) -> "RunConfig":
        def paths(name) -> tuple[Path, ...]:
            return tuple(Path(p) for p in (getattr(args, name, None) or []))

        def path(name) -> Path | None:
            value = getattr(args, name, None)
            return Path(value) if value else None

        config = cls(
            ontology_paths=paths("ontology"),
            corpus_paths=paths("corpus"),
            mapping_path=path("mapping"),
            embeddings_path=path("embeddings"),
            rankings_path=path("rankings"),
            judgments_path=path("judgments"),
            rules_path=path("rules"),
            index_path=path("index"),
            level=getattr(args, "level", None),
            bm25_k1=getattr(args, "bm25_k1", DEFAULT_K1),
            bm25_b=getattr(args, "bm25_b", DEFAULT_B),
            policy=cat.AboutnessPolicy.parse(args.policy) if getattr(args, "policy", None) else None,
            seed=getattr(args, "seed", 0),
            threads=getattr(args, "threads", 4),
            top=getattr(args, "top", 50),
            out_dir=Path(getattr(args, "out", ".") or "."),
        )
        missing = []
        inputs = [
            *config.ontology_paths,
            *config.corpus_paths,
            config.mapping_path,
            config.embeddings_path,
            config.rankings_path,
            config.rules_path,
            config.index_path,
        ]
        if not judgments_is_output:
            inputs.append(config.judgments_path)
        for candidate in inputs:
            if candidate is not None and not candidate.exists():
                missing.append(str(candidate))
        if judgments_is_output and config.judgments_path is not None:
            parent = config.judgments_path.parent
            if not parent.exists():
                missing.append(str(parent))
        if missing:
            raise NotFoundError("file not found: " + ", ".join(missing))
        return config


# ---------------------------------------------------------------------------
# output helpers


def atomic_write_text(path: Path, text: str) -> None:
    """Write the whole file or nothing: temp file in place, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header_comment: str, columns: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    buffer.write(f"# {header_comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def fmt(value: float) -> str:
    return f"{value:.6g}"


# ---------------------------------------------------------------------------
# shared loading


def load_ontologies(config: RunConfig) -> dict[str, Ontology]:
    ontologies: dict[str, Ontology] = {}
    for path in config.ontology_paths:
        ontology = load_ontology(path)
        if ontology.name in ontologies:
            raise ConfigError(f"two ontology files share the name {ontology.name!r}")
        ontologies[ontology.name] = ontology
    return ontologies


def load_corpora(config: RunConfig) -> list[Corpus]:
    return [load_corpus(path) for path in config.corpus_paths]


def load_rules_or_default(config: RunConfig) -> NormalizationRules:
    return load_rules(config.rules_path) if config.rules_path else default_rules()


def corpus_labels(corpora: list[Corpus], rules: NormalizationRules) -> set[str]:
    """Normalized labels of every labeled unit across the corpora."""
    labels: set[str] = set()
    for corpus in corpora:
        for unit in corpus.units:
            if unit.raw_label is not None:
                labels.add(cov.normalized_or_raw(unit.raw_label, rules))
    return labels


def read_rankings(path: Path) -> dict[tuple[str, int], dict[str, dict[str, list[ScoredTopic]]]]:
    """Parse a rankings CSV into (ontology, level) -> approach -> unit -> ranked list.

    Units that one approach never ranked get an explicit empty ranking so
    every approach covers the same unit universe.
    """
    groups: dict[tuple[str, int], dict[str, dict[str, list[ScoredTopic]]]] = {}
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(line for line in handle if not line.startswith("#"))
        header = next(reader, None)
        if header != RANKINGS_COLUMNS:
            raise ParseError(f"{path.name}: expected rankings columns {RANKINGS_COLUMNS}, got {header}")
        for row in reader:
            if not row:
                continue
            approach, ontology, level, unit_id, topic_id, _rank, score = row
            group = groups.setdefault((ontology, int(level)), {})
            group.setdefault(approach, {}).setdefault(unit_id, []).append(ScoredTopic(topic_id, float(score)))
    for group in groups.values():
        universe = sorted({u for by_unit in group.values() for u in by_unit})
        for by_unit in group.values():
            for unit_id in universe:
                by_unit.setdefault(unit_id, [])
    return groups


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest_check(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    ontologies = load_ontologies(config)
    for ontology in ontologies.values():
        levels = ",".join(str(l) for l in ontology.levels())
        print(
            f"ontology {ontology.name}: {len(ontology.topics)} topics,"
            f" levels [{levels}], {len(ontology.documents)} documents"
        )
    for corpus in load_corpora(config):
        print(f"corpus {corpus.name}: {len(corpus.units)} units, labeled={str(corpus.labeled).lower()}")
    if config.mapping_path:
        mapping = cov.load_label_mapping(config.mapping_path, ontologies)
        entries = sum(len(ts) for ts in mapping.entries.values())
        print(f"mapping {config.mapping_path.name}: {len(mapping.entries)} labels, {entries} entries")
    print("ok")
    return 0


def _built_index(config: RunConfig, ontology: Ontology, path: Path) -> TopicIndex:
    """Build the level index, honoring a cache file when one is supplied."""
    fingerprint = cache_fingerprint(file_digest(path), config.level, config.bm25_k1, config.bm25_b)
    if config.index_path is not None:
        try:
            return load_index(config.index_path, expected_fingerprint=fingerprint)
        except ArgmapError as exc:
            log.warning("index cache unusable (%s); rebuilding", exc)
    return build_index(ontology, config.level, config.bm25_k1, config.bm25_b)


def cmd_index(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.ontology_paths:
        raise UsageError("index requires at least one --ontology")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    for path in config.ontology_paths:
        ontology = propagate_documents(load_ontology(path))
        idx = build_index(ontology, config.level, config.bm25_k1, config.bm25_b)
        fingerprint = cache_fingerprint(file_digest(path), config.level, config.bm25_k1, config.bm25_b)
        target = config.out_dir / f"{ontology.name}-L{config.level}.idx"
        save_index(idx, target, fingerprint)
        print(f"indexed {ontology.name} level {config.level}: {idx.n_topics} topics -> {target}")
    return 0


def cmd_shortlist(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.ontology_paths or not config.corpus_paths:
        raise UsageError("shortlist requires --ontology and --corpus")
    if config.index_path is not None and len(config.ontology_paths) != 1:
        raise UsageError("--index pairs with exactly one --ontology")
    rules = load_rules_or_default(config)
    labels = corpus_labels(load_corpora(config), rules)
    rows: list[list[str]] = []
    for path in config.ontology_paths:
        ontology = propagate_documents(load_ontology(path))
        idx = _built_index(config, ontology, path)
        shortlist = cov.shortlist_labels(labels, idx, n=config.top)
        for label in sorted(shortlist):
            for rank, scored in enumerate(shortlist[label], start=1):
                rows.append([ontology.name, str(config.level), label, str(rank), scored.topic_id, repr(scored.score)])
    text = render_csv(
        "argmap shortlist",
        ["ontology", "level", "label", "rank", "topic_id", "score"],
        rows,
    )
    target = config.out_dir / "shortlist.csv"
    atomic_write_text(target, text)
    print(f"wrote {target}")
    return 0


def _unit_rankings(
    unit: CorpusUnit,
    topics,
    idx: TopicIndex,
    embeddings: cat.EmbeddingTable | None,
    topic_vectors: list[cat.TopicEmbedding],
    top: int,
) -> dict[str, list[ScoredTopic]]:
    matched = sorted(cat.direct_match(unit, topics))
    result = {
        "direct": [ScoredTopic(tid, 1.0) for tid in matched][:top],
        "si": cat.semantic_interpretation(unit, idx)[:top],
    }
    if embeddings is not None:
        result["text2vec"] = cat.text2vec_si(unit, topic_vectors, embeddings)[:top]
    return result


def cmd_categorize(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.ontology_paths or not config.corpus_paths:
        raise UsageError("categorize requires --ontology and --corpus")
    corpora = load_corpora(config)
    units = [unit for corpus in corpora for unit in corpus.units]
    embeddings = cat.load_embedding_table(config.embeddings_path) if config.embeddings_path else None
    rank_rows: list[list[str]] = []
    label_rows: list[list[str]] = []
    for path in config.ontology_paths:
        ontology = propagate_documents(load_ontology(path))
        idx = build_index(ontology, config.level, config.bm25_k1, config.bm25_b)
        topics = ontology.topics_at_level(config.level)
        topic_vectors: list[cat.TopicEmbedding] = []
        if embeddings is not None:
            pdocs = pseudo_documents(ontology, config.level)
            topic_vectors = [
                cat.topic_embedding(
                    topic_id,
                    pdocs[topic_id],
                    embeddings,
                    seed=cat.derive_seed(config.seed, f"{ontology.name}:{topic_id}"),
                )
                for topic_id in sorted(pdocs)
            ]
        worker = lambda unit: _unit_rankings(unit, topics, idx, embeddings, topic_vectors, config.top)
        with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
            per_unit = list(pool.map(worker, units))
        for unit, rankings in zip(units, per_unit):
            for approach in sorted(rankings):
                for rank, scored in enumerate(rankings[approach], start=1):
                    rank_rows.append(
                        [
                            approach,
                            ontology.name,
                            str(config.level),
                            unit.uid,
                            scored.topic_id,
                            str(rank),
                            repr(scored.score),
                        ]
                    )
                if config.policy is not None:
                    for topic_id in sorted(cat.apply_policy(rankings[approach], config.policy)):
                        label_rows.append([approach, ontology.name, str(config.level), unit.uid, topic_id])
    header = f"argmap categorize seed={config.seed}"
    target = config.out_dir / "rankings.csv"
    atomic_write_text(target, render_csv(header, RANKINGS_COLUMNS, rank_rows))
    print(f"wrote {target}")
    if config.policy is not None:
        kind, parameter = config.policy.describe()
        labels_target = config.out_dir / "labels.csv"
        atomic_write_text(
            labels_target,
            render_csv(
                f"{header} policy={kind}:{parameter}",
                ["approach", "ontology", "level", "unit_id", "topic_id"],
                label_rows,
            ),
        )
        print(f"wrote {labels_target}")
    return 0


def cmd_coverage(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.ontology_paths or not config.corpus_paths or not config.mapping_path:
        raise UsageError("coverage requires --ontology, --corpus, and --mapping")
    rules = load_rules_or_default(config)
    ontologies = load_ontologies(config)
    corpora = load_corpora(config)
    mapping = cov.load_label_mapping(config.mapping_path, ontologies)
    all_labels = corpus_labels(corpora, rules)

    curve_rows: list[list[str]] = []
    dist_rows: list[list[str]] = []
    stats_rows: list[list[str]] = []
    summary: list[str] = ["coverage report", ""]
    for name in sorted(ontologies):
        ontology = ontologies[name]
        stats = cov.mapping_stats(mapping, ontology, config.level, all_labels)
        curve = cov.coverage_curve(mapping, ontology, config.level)
        distribution = cov.unit_distribution(corpora, mapping, ontology, config.level, rules)
        for n in sorted(curve.points):
            curve_rows.append([name, str(config.level), str(n), fmt(curve.points[n])])
        ordered = sorted(distribution.counts.items(), key=lambda item: (-item[1], item[0]))
        for topic_id, count in ordered:
            dist_rows.append([name, str(config.level), topic_id, str(count)])
        dist_rows.append([name, str(config.level), "__unmapped__", str(distribution.unmapped)])
        topic_count = len(ontology.topics_at_level(config.level))
        stats_rows.append(
            [
                name,
                str(config.level),
                str(len(all_labels)),
                str(stats.mapped_label_count),
                str(topic_count),
                str(stats.covered_topic_count),
                fmt(stats.min_per_label),
                fmt(stats.mean_per_label),
                fmt(stats.max_per_label),
            ]
        )
        summary.append(
            f"{name} L{config.level}: {stats.mapped_label_count}/{len(all_labels)} labels mapped; "
            f"{stats.covered_topic_count}/{topic_count} topics covered; "
            f"per-label min/mean/max = {fmt(stats.min_per_label)}/{fmt(stats.mean_per_label)}/{fmt(stats.max_per_label)}; "
            f"{distribution.unmapped} units unmapped"
        )

    atomic_write_text(
        config.out_dir / "curve.csv",
        render_csv("argmap coverage", ["ontology", "level", "n", "proportion"], curve_rows),
    )
    atomic_write_text(
        config.out_dir / "distribution.csv",
        render_csv("argmap coverage", ["ontology", "level", "topic_id", "unit_count"], dist_rows),
    )
    atomic_write_text(
        config.out_dir / "stats.csv",
        render_csv(
            "argmap coverage",
            [
                "ontology",
                "level",
                "labels_total",
                "labels_mapped",
                "topics_total",
                "topics_covered",
                "min_per_label",
                "mean_per_label",
                "max_per_label",
            ],
            stats_rows,
        ),
    )
    atomic_write_text(config.out_dir / "summary.txt", "\n".join(summary) + "\n")
    for filename in ("curve.csv", "distribution.csv", "stats.csv", "summary.txt"):
        print(f"wrote {config.out_dir / filename}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.rankings_path or not config.judgments_path:
        raise UsageError("evaluate requires --rankings and --judgments")
    if config.policy is None:
        raise UsageError("evaluate requires --policy (threshold:<theta> or topk:<k>)")
    groups = read_rankings(config.rankings_path)
    judgments = ev.load_judgments(config.judgments_path)
    kind, parameter = config.policy.describe()
    rows: list[list[str]] = []
    for ontology_name, level in sorted(groups):
        group = groups[(ontology_name, level)]
        pool = ev.build_pool(group, depth=args.pool_depth)
        gold = ev.gold_from_judgments(judgments, pool=pool)
        for approach in sorted(group):
            predicted = {u: cat.apply_policy(ranked, config.policy) for u, ranked in group[approach].items()}
            result = ev.prf(predicted, gold, pool)
            rows.append(
                [
                    approach,
                    ontology_name,
                    str(level),
                    kind,
                    parameter,
                    fmt(result.precision),
                    fmt(result.recall),
                    fmt(result.f1),
                ]
            )
    target = config.out_dir / "evaluation.csv"
    atomic_write_text(
        target,
        render_csv(
            "argmap evaluate",
            ["approach", "ontology", "level", "policy", "parameter", "precision", "recall", "f1"],
            rows,
        ),
    )
    print(f"wrote {target}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = RunConfig.from_args(args)
    if not config.rankings_path or not config.judgments_path:
        raise UsageError("sweep requires --rankings and --judgments")
    groups = read_rankings(config.rankings_path)
    judgments = ev.load_judgments(config.judgments_path)
    grid = tuple(i * args.grid_step for i in range(int(round(1.0 / args.grid_step)) + 1))
    families = ("threshold", "top_k") if args.family == "both" else (args.family,)
    rows: list[list[str]] = []
    for ontology_name, level in sorted(groups):
        group = groups[(ontology_name, level)]
        pool = ev.build_pool(group, depth=args.pool_depth)
        gold = ev.gold_from_judgments(judgments, pool=pool)
        for approach in sorted(group):
            best: tuple[cat.AboutnessPolicy, ev.PRF] | None = None
            for family in families:
                policy, result = ev.sweep_policy(
                    group[approach], gold, pool, family, grid=grid, k_max=args.k_max
                )
                if best is None or result.f1 > best[1].f1:
                    best = (policy, result)
            kind, parameter = best[0].describe()
            rows.append(
                [
                    approach,
                    ontology_name,
                    str(level),
                    kind,
                    parameter,
                    fmt(best[1].precision),
                    fmt(best[1].recall),
                    fmt(best[1].f1),
                ]
            )
    target = config.out_dir / "sweep.csv"
    atomic_write_text(
        target,
        render_csv(
            "argmap sweep",
            ["approach", "ontology", "level", "policy", "parameter", "precision", "recall", "f1"],
            rows,
        ),
    )
    print(f"wrote {target}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .annotation import AnnotationService, make_server

    config = RunConfig.from_args(args, judgments_is_output=True)
    if not config.rankings_path or not config.judgments_path:
        raise UsageError("serve requires --rankings and --judgments")
    if len(config.ontology_paths) != 1:
        raise UsageError("serve requires exactly one --ontology")
    ontology = load_ontology(config.ontology_paths[0])
    groups = read_rankings(config.rankings_path)
    key = (ontology.name, config.level)
    if key not in groups:
        raise NotFoundError(f"rankings contain nothing for ontology {ontology.name!r} level {config.level}")
    pool = ev.build_pool(groups[key], depth=args.pool_depth)
    unit_texts: dict[str, str] = {}
    for corpus in load_corpora(config):
        for unit in corpus.units:
            unit_texts[unit.uid] = unit.text
    labels = {topic.id: topic.label for topic in ontology.topics.values()}
    service = AnnotationService(
        pool=pool,
        unit_texts=unit_texts,
        topic_labels=labels,
        judgments_path=config.judgments_path,
        seed=config.seed,
    )
    ui_dir = getattr(args, "ui_dir", None)
    if ui_dir and not Path(ui_dir).is_dir():
        raise NotFoundError(f"ui directory not found: {ui_dir}")
    server = make_server(service, port=args.port, ui_dir=ui_dir)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}/ (pool: {pool.total_pairs} pairs)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    if "ontology" in names:
        parser.add_argument("--ontology", action="append", metavar="PATH", help="ontology file (repeatable)")
    if "corpus" in names:
        parser.add_argument(
            "--corpus", "--corpora", dest="corpus", action="append", metavar="PATH", help="corpus file (repeatable)"
        )
    if "level" in names:
        parser.add_argument("--level", type=int, default=1, metavar="N", help="ontology level (default 1)")
    if "bm25" in names:
        parser.add_argument("--bm25-k1", type=float, default=DEFAULT_K1, metavar="K1")
        parser.add_argument("--bm25-b", type=float, default=DEFAULT_B, metavar="B")
    if "seed" in names:
        parser.add_argument("--seed", type=int, default=0, metavar="N", help="root random seed (default 0)")
    if "out" in names:
        parser.add_argument("--out", default=".", metavar="DIR", help="output directory (default .)")
    if "rules" in names:
        parser.add_argument("--rules", metavar="PATH", help="normalization rules file (default: shipped rules)")
    if "pool-depth" in names:
        parser.add_argument("--pool-depth", type=int, default=ev.POOL_DEPTH, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="argmap", description="Map argument corpora onto topic ontologies.")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = commands.add_parser("ingest-check", help="validate ontology/corpus/mapping files")
    _add_common(p, "ontology", "corpus")
    p.add_argument("--mapping", metavar="PATH")
    p.set_defaults(func=cmd_ingest_check)

    p = commands.add_parser("index", help="build and cache a topic index")
    _add_common(p, "ontology", "level", "bm25", "out")
    p.set_defaults(func=cmd_index)

    p = commands.add_parser("shortlist", help="BM25 candidate topics per normalized corpus label")
    _add_common(p, "ontology", "corpus", "level", "bm25", "out", "rules")
    p.add_argument("--index", metavar="PATH", help="optional index cache from the index command")
    p.add_argument("--top", type=int, default=cov.SHORTLIST_DEPTH, metavar="N")
    p.set_defaults(func=cmd_shortlist)

    p = commands.add_parser("categorize", help="rank topics per corpus unit with all approaches")
    _add_common(p, "ontology", "corpus", "level", "bm25", "seed", "out")
    p.add_argument("--embeddings", metavar="PATH", help="word-vector table enabling the text2vec approach")
    p.add_argument("--policy", metavar="SPEC", help="also emit labels.csv via threshold:<theta> or topk:<k>")
    p.add_argument("--top", type=int, default=50, metavar="N", help="ranked topics kept per unit (default 50)")
    p.add_argument("--threads", type=int, default=4, metavar="N", help="parallel unit categorization (default 4)")
    p.set_defaults(func=cmd_categorize)

    p = commands.add_parser("coverage", help="coverage curve, unit distribution, mapping stats")
    _add_common(p, "ontology", "corpus", "level", "out", "rules")
    p.add_argument("--mapping", metavar="PATH", required=False)
    p.set_defaults(func=cmd_coverage)

    p = commands.add_parser("evaluate", help="precision/recall/F1 of rankings against judgments")
    _add_common(p, "out", "pool-depth")
    p.add_argument("--rankings", metavar="PATH")
    p.add_argument("--judgments", metavar="PATH")
    p.add_argument("--policy", metavar="SPEC", help="threshold:<theta> or topk:<k>")
    p.set_defaults(func=cmd_evaluate)

    p = commands.add_parser("sweep", help="find the F1-maximizing policy parameter")
    _add_common(p, "out", "pool-depth")
    p.add_argument("--rankings", metavar="PATH")
    p.add_argument("--judgments", metavar="PATH")
    p.add_argument("--family", choices=("threshold", "top_k", "both"), default="both")
    p.add_argument("--grid-step", type=float, default=0.01, metavar="STEP")
    p.add_argument("--k-max", type=int, default=None, metavar="K")
    p.set_defaults(func=cmd_sweep)

    p = commands.add_parser("serve", help="run the annotation service over a pooled rankings file")
    _add_common(p, "ontology", "corpus", "level", "seed", "pool-depth")
    p.add_argument("--rankings", metavar="PATH")
    p.add_argument("--judgments", metavar="PATH", help="append-only judgments file (created if missing)")
    p.add_argument("--port", type=int, default=8080, metavar="PORT")
    p.add_argument("--ui-dir", metavar="DIR", help="static UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def configure_logging() -> None:
    level_name = os.environ.get("ARGMAP_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    if not getattr(args, "command", None):
        print(parser.format_usage(), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ArgmapError as exc:
        print(f"argmap: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"argmap: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

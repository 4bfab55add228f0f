"""Regenerate judgments.jsonl for the bundled fixture.

Three simulated assessors vote on every pooled (unit, topic) pair produced
by running all approaches over the fixture.  Votes follow the label
mapping, with seeded per-assessor noise so agreement is high but not
perfect.  Run from the repository root:

    python3 tests/fixtures/make_judgments.py
"""

import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

from argmap.categorize import EmbeddingTable  # noqa: F401  (import check)
from argmap.cli import RunConfig, read_rankings
from argmap.coverage import load_label_mapping, normalized_or_raw
from argmap.corpus import load_corpus
from argmap.evaluation import build_pool
from argmap.ontology import load_ontology
from argmap.textproc import default_rules

FIXTURES = Path(__file__).parent
ASSESSORS = ("anna", "ben", "carol")
NOISE = 0.12


def main() -> None:
    import subprocess
    import sys
    import tempfile

    with tempfile.TemporaryDirectory() as out:
        subprocess.run(
            [
                sys.executable,
                "-m",
                "argmap",
                "categorize",
                *["--ontology", str(FIXTURES / "wef.jsonl")],
                *["--ontology", str(FIXTURES / "wiki.jsonl")],
                *["--ontology", str(FIXTURES / "debate.jsonl")],
                *["--corpus", str(FIXTURES / "units.jsonl")],
                *["--embeddings", str(FIXTURES / "embeddings.txt")],
                *["--level", "2", "--seed", "0", "--out", out],
            ],
            check=True,
            capture_output=True,
        )
        groups = read_rankings(Path(out) / "rankings.csv")

    ontologies = {
        name: load_ontology(FIXTURES / f"{name}.jsonl") for name in ("wef", "wiki", "debate")
    }
    rules = default_rules()
    corpus = load_corpus(FIXTURES / "units.jsonl")
    label_by_uid = {u.uid: normalized_or_raw(u.raw_label, rules) for u in corpus.units}
    mapping = load_label_mapping(FIXTURES / "mapping.jsonl", ontologies)

    rng = random.Random(99)
    start = datetime(2024, 5, 1, 9, 0, tzinfo=timezone.utc)
    lines = []
    minute = 0
    for (ontology_name, level), group in sorted(groups.items()):
        pool = build_pool(group)
        for unit_id in sorted(pool.topics_by_unit):
            mapped = mapping.topics_for(label_by_uid[unit_id], ontology_name, level)
            for topic_id in sorted(pool.topics_by_unit[unit_id]):
                truth = topic_id in mapped
                for assessor in ASSESSORS:
                    vote = (not truth) if rng.random() < NOISE else truth
                    ts = (start + timedelta(minutes=minute)).isoformat()
                    minute += 1
                    lines.append(
                        '{"assessor":"%s","unit_id":"%s","topic_id":"%s","about":%s,"timestamp":"%s"}'
                        % (assessor, unit_id, topic_id, "true" if vote else "false", ts)
                    )
    target = FIXTURES / "judgments.jsonl"
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {target} ({len(lines)} judgments)")


if __name__ == "__main__":
    main()

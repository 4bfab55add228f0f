"""Corpus ingestion round-trips and integrity checks."""

import io

import pytest

from argmap.corpus import dump_corpus, load_corpus
from argmap.errors import IntegrityError, ParseError


def corpus_stream(records: list[str]) -> io.StringIO:
    stream = io.StringIO("\n".join(records) + "\n")
    stream.name = "corpus.jsonl"
    return stream


class TestLoadCorpus:
    def test_all_labeled(self):
        corpus = load_corpus(
            corpus_stream(
                [
                    '{"corpus":"c","unit_id":"u1","text":"one","raw_label":"guns"}',
                    '{"corpus":"c","unit_id":"u2","text":"two","raw_label":"taxes"}',
                ]
            )
        )
        assert corpus.labeled

    def test_one_unlabeled(self):
        corpus = load_corpus(
            corpus_stream(
                [
                    '{"corpus":"c","unit_id":"u1","text":"one","raw_label":"guns"}',
                    '{"corpus":"c","unit_id":"u2","text":"two"}',
                ]
            )
        )
        assert not corpus.labeled

    def test_label_stored_verbatim(self):
        raw = "This house should ban guns"
        corpus = load_corpus(corpus_stream([f'{{"corpus":"c","unit_id":"u1","text":"t","raw_label":"{raw}"}}']))
        assert corpus.units[0].raw_label == raw

    def test_duplicate_unit_id(self):
        records = [
            '{"corpus":"c","unit_id":"u1","text":"one"}',
            '{"corpus":"c","unit_id":"u1","text":"two"}',
        ]
        with pytest.raises(IntegrityError, match="duplicate"):
            load_corpus(corpus_stream(records))

    def test_empty_text(self):
        with pytest.raises(IntegrityError, match="empty text"):
            load_corpus(corpus_stream(['{"corpus":"c","unit_id":"u1","text":""}']))

    def test_mixed_corpus_names(self):
        records = [
            '{"corpus":"a","unit_id":"u1","text":"one"}',
            '{"corpus":"b","unit_id":"u2","text":"two"}',
        ]
        with pytest.raises(IntegrityError, match="mixed"):
            load_corpus(corpus_stream(records))

    def test_missing_field(self):
        with pytest.raises(ParseError, match="text"):
            load_corpus(corpus_stream(['{"corpus":"c","unit_id":"u1"}']))

    def test_file_order_preserved(self):
        records = [f'{{"corpus":"c","unit_id":"u{i}","text":"t{i}"}}' for i in range(5)]
        corpus = load_corpus(corpus_stream(records))
        assert [u.unit_id for u in corpus.units] == [f"u{i}" for i in range(5)]

    def test_round_trip(self):
        records = [
            '{"corpus":"c","unit_id":"u1","text":"emoji \\u2764 text","raw_label":"ban guns","granularity":"argument"}',
            '{"corpus":"c","unit_id":"u2","text":"plain"}',
        ]
        corpus = load_corpus(corpus_stream(records))
        dumped = dump_corpus(corpus)
        reloaded = load_corpus(corpus_stream(dumped.splitlines()))
        assert reloaded.units == corpus.units
        assert reloaded.name == corpus.name

    def test_uid_qualified(self):
        corpus = load_corpus(corpus_stream(['{"corpus":"essays","unit_id":"7","text":"t"}']))
        assert corpus.units[0].uid == "essays:7"

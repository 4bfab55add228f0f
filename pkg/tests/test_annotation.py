"""Annotation service: session determinism, persistence, and the HTTP API."""

import io
import json
import threading
import urllib.request

import pytest

from argmap.annotation import AnnotationService, make_server
from argmap.errors import IntegrityError, NotFoundError
from argmap.evaluation import Pool, load_judgments


@pytest.fixture
def pool():
    return Pool(
        {
            "u1": frozenset({"t1", "t2", "t3"}),
            "u2": frozenset({"t1", "t4"}),
            "u3": frozenset({"t2"}),
        }
    )


@pytest.fixture
def service(pool, tmp_path):
    return AnnotationService(
        pool=pool,
        unit_texts={"u1": "first unit", "u2": "second unit", "u3": "third unit"},
        topic_labels={"t1": "guns", "t2": "taxes", "t3": "climate", "t4": "energy"},
        judgments_path=tmp_path / "judgments.jsonl",
        seed=0,
    )


class TestSessionOrder:
    def test_deterministic_per_assessor(self, service, pool, tmp_path):
        first = service.session_order("alice")
        again = service.session_order("alice")
        assert first == again
        restarted = AnnotationService(
            pool=pool,
            unit_texts=service.unit_texts,
            topic_labels=service.topic_labels,
            judgments_path=tmp_path / "judgments.jsonl",
            seed=0,
        )
        assert restarted.session_order("alice") == first

    def test_assessors_get_different_orders(self, tmp_path):
        pool = Pool({f"u{i}": frozenset({f"t{j}" for j in range(4)}) for i in range(25)})
        service = AnnotationService(
            pool=pool,
            unit_texts={f"u{i}": f"unit {i}" for i in range(25)},
            topic_labels={},
            judgments_path=tmp_path / "j.jsonl",
            seed=0,
        )
        assert service.session_order("alice") != service.session_order("bob")

    def test_units_grouped_in_order(self, service):
        order = service.session_order("alice")
        seen_units = []
        for unit_id, _ in order:
            if not seen_units or seen_units[-1] != unit_id:
                seen_units.append(unit_id)
        assert sorted(seen_units) == ["u1", "u2", "u3"]
        assert len(seen_units) == 3  # no unit appears in two runs

    def test_empty_assessor_rejected(self, service):
        with pytest.raises(IntegrityError):
            service.session_order("  ")


class TestNextAndSubmit:
    def test_fresh_assessor_gets_first_pair(self, service):
        item = service.next_item("alice")
        assert item["status"] == "ok"
        assert (item["unit_id"], item["topic_id"]) == service.session_order("alice")[0]
        states = [entry["state"] for entry in item["pool"]]
        assert states.count("current") == 1
        assert set(states) <= {"current", "pending"}

    def test_submit_advances(self, service):
        first = service.next_item("alice")
        service.submit_judgment("alice", first["unit_id"], first["topic_id"], True)
        second = service.next_item("alice")
        assert (second["unit_id"], second["topic_id"]) == service.session_order("alice")[1]

    def test_pool_states_reflect_judgments(self, service):
        order = service.session_order("alice")
        first_unit = order[0][0]
        unit_pairs = [p for p in order if p[0] == first_unit]
        service.submit_judgment("alice", *unit_pairs[0], True)
        if len(unit_pairs) > 1:
            service.submit_judgment("alice", *unit_pairs[1], False)
        item = service.next_item("alice")
        states = {entry["topic_id"]: entry["state"] for entry in item["pool"]}
        if item["unit_id"] == first_unit:
            assert states[unit_pairs[0][1]] == "about"
            if len(unit_pairs) > 1:
                assert states[unit_pairs[1][1]] == "not-about"

    def test_out_of_pool_rejected(self, service, tmp_path):
        with pytest.raises(NotFoundError):
            service.submit_judgment("alice", "u1", "t4", True)
        assert not (tmp_path / "judgments.jsonl").exists()

    def test_completion(self, service):
        for unit_id, topic_id in service.session_order("alice"):
            service.submit_judgment("alice", unit_id, topic_id, True)
        done = service.next_item("alice")
        assert done["status"] == "complete"
        assert done["judged"] == done["total"] == 6

    def test_progress(self, service):
        assert service.progress("alice") == {"assessor": "alice", "judged": 0, "total": 6}
        first = service.session_order("alice")[0]
        service.submit_judgment("alice", *first, False)
        assert service.progress("alice")["judged"] == 1


class TestPersistence:
    def test_judgment_survives_restart(self, service, pool, tmp_path):
        first = service.session_order("alice")[0]
        service.submit_judgment("alice", *first, True)
        reloaded = AnnotationService(
            pool=pool,
            unit_texts=service.unit_texts,
            topic_labels=service.topic_labels,
            judgments_path=tmp_path / "judgments.jsonl",
            seed=0,
        )
        assert reloaded.progress("alice")["judged"] == 1
        item = reloaded.next_item("alice")
        assert (item["unit_id"], item["topic_id"]) == reloaded.session_order("alice")[1]

    def test_resubmission_latest_wins(self, service):
        first = service.session_order("alice")[0]
        service.submit_judgment("alice", *first, True)
        service.submit_judgment("alice", *first, False)
        export = service.export_judgments()
        stream = io.StringIO(export)
        stream.name = "export.jsonl"
        [only] = load_judgments(stream)
        assert only.about is False

    def test_export_empty_has_header(self, service):
        export = service.export_judgments()
        assert export.startswith("#")
        stream = io.StringIO(export)
        stream.name = "export.jsonl"
        assert load_judgments(stream) == []

    def test_export_latest_wins_count(self, service):
        pairs = service.session_order("alice")[:3]
        for unit_id, topic_id in pairs:
            service.submit_judgment("alice", unit_id, topic_id, True)
        service.submit_judgment("alice", *pairs[0], False)
        stream = io.StringIO(service.export_judgments())
        stream.name = "export.jsonl"
        assert len(load_judgments(stream)) == 3

    def test_concurrent_submissions_no_torn_records(self, pool, tmp_path):
        service = AnnotationService(
            pool=pool,
            unit_texts={"u1": "a", "u2": "b", "u3": "c"},
            topic_labels={},
            judgments_path=tmp_path / "judgments.jsonl",
            seed=0,
        )
        assessors = [f"worker{i}" for i in range(4)]
        errors = []

        def run(assessor):
            try:
                for unit_id, topic_id in service.session_order(assessor):
                    service.submit_judgment(assessor, unit_id, topic_id, True)
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=run, args=(a,)) for a in assessors]
        exports = []
        for t in threads:
            t.start()
        for _ in range(5):
            exports.append(service.export_judgments())
        for t in threads:
            t.join()
        assert not errors
        for export in exports:
            stream = io.StringIO(export)
            stream.name = "export.jsonl"
            load_judgments(stream)  # parses: no torn records
        final = service.export_judgments()
        stream = io.StringIO(final)
        stream.name = "export.jsonl"
        assert len(load_judgments(stream)) == 6 * len(assessors)


class TestHTTP:
    @pytest.fixture
    def server(self, service):
        httpd = make_server(service, port=0)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        yield f"http://127.0.0.1:{httpd.server_address[1]}"
        httpd.shutdown()
        httpd.server_close()

    def get(self, url):
        with urllib.request.urlopen(url, timeout=5) as response:
            return response.status, json.loads(response.read().decode("utf-8"))

    def test_full_round_trip(self, server, service):
        status, item = self.get(f"{server}/api/session/alice/next")
        assert status == 200 and item["status"] == "ok"
        body = json.dumps(
            {"assessor": "alice", "unit_id": item["unit_id"], "topic_id": item["topic_id"], "about": True}
        ).encode("utf-8")
        request = urllib.request.Request(f"{server}/api/judgment", data=body, method="POST")
        request.add_header("Content-Type", "application/json")
        with urllib.request.urlopen(request, timeout=5) as response:
            ack = json.loads(response.read().decode("utf-8"))
        assert ack["status"] == "ok" and ack["judged"] == 1
        status, progress = self.get(f"{server}/api/progress/alice")
        assert progress["judged"] == 1
        with urllib.request.urlopen(f"{server}/api/export", timeout=5) as response:
            text = response.read().decode("utf-8")
        stream = io.StringIO(text)
        stream.name = "export.jsonl"
        [only] = load_judgments(stream)
        assert only.unit_id == item["unit_id"]

    def test_out_of_pool_conflict(self, server):
        body = json.dumps({"assessor": "alice", "unit_id": "u1", "topic_id": "t4", "about": True}).encode()
        request = urllib.request.Request(f"{server}/api/judgment", data=body, method="POST")
        try:
            urllib.request.urlopen(request, timeout=5)
            raise AssertionError("expected HTTP error")
        except urllib.error.HTTPError as exc:
            assert exc.code == 409

    def test_bad_body_rejected(self, server):
        request = urllib.request.Request(f"{server}/api/judgment", data=b"not json", method="POST")
        try:
            urllib.request.urlopen(request, timeout=5)
            raise AssertionError("expected HTTP error")
        except urllib.error.HTTPError as exc:
            assert exc.code == 400

    def test_placeholder_page(self, server):
        with urllib.request.urlopen(f"{server}/", timeout=5) as response:
            assert b"annotation" in response.read()

    def test_unknown_api_endpoint(self, server):
        try:
            urllib.request.urlopen(f"{server}/api/nope", timeout=5)
            raise AssertionError("expected HTTP error")
        except urllib.error.HTTPError as exc:
            assert exc.code == 404


class TestServiceValidation:
    def test_pool_unit_without_text(self, tmp_path):
        with pytest.raises(IntegrityError, match="without text"):
            AnnotationService(
                pool=Pool({"u1": frozenset({"t"})}),
                unit_texts={},
                topic_labels={},
                judgments_path=tmp_path / "j.jsonl",
            )

"""HTTP service dealing pooled (unit, topic) items to assessors.

Each assessor works through the pool in their own deterministic random
order: units are shuffled, and within each unit the pooled topics are
shuffled, both driven by a generator seeded from (global seed, assessor
id).  Judgments append to a single JSONL file under a writer lock; an
acknowledged judgment survives restart because the file is replayed on
startup.
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote

from .categorize import derive_seed
from .errors import IntegrityError, NotFoundError
from .evaluation import Judgment, Pool, load_judgments, dump_judgments

log = logging.getLogger(__name__)

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>argmap annotation</title></head>
<body><h1>argmap annotation service</h1>
<p>No UI assets were configured (start the server with --ui-dir).
The JSON API is available under <code>/api/</code>.</p></body></html>
"""


class AnnotationService:
    """Session ordering, judgment persistence, and progress tracking."""

    def __init__(
        self,
        pool: Pool,
        unit_texts: dict[str, str],
        topic_labels: dict[str, str],
        judgments_path: str | Path,
        seed: int = 0,
    ):
        missing_units = sorted(set(pool.topics_by_unit) - set(unit_texts))
        if missing_units:
            raise IntegrityError(f"pool units without text: {', '.join(missing_units)}")
        self.pool = pool
        self.unit_texts = unit_texts
        self.topic_labels = topic_labels
        self.seed = seed
        self.judgments_path = Path(judgments_path)
        self._lock = threading.Lock()
        self._latest: dict[tuple[str, str, str], Judgment] = {}
        self._orders: dict[str, list[tuple[str, str]]] = {}
        if self.judgments_path.exists():
            for judgment in load_judgments(self.judgments_path):
                self._latest[judgment.key] = judgment

    # -- session ordering ------------------------------------------------

    def session_order(self, assessor: str) -> list[tuple[str, str]]:
        """The assessor's full (unit, topic) presentation order."""
        self._require_assessor(assessor)
        order = self._orders.get(assessor)
        if order is None:
            rng = random.Random(derive_seed(self.seed, assessor))
            units = sorted(self.pool.topics_by_unit)
            rng.shuffle(units)
            order = []
            for unit_id in units:
                topics = sorted(self.pool.topics_by_unit[unit_id])
                rng.shuffle(topics)
                order.extend((unit_id, topic_id) for topic_id in topics)
            self._orders[assessor] = order
        return order

    @staticmethod
    def _require_assessor(assessor: str) -> None:
        if not assessor or not assessor.strip():
            raise IntegrityError("assessor id must be non-empty")

    def _judged(self, assessor: str) -> dict[tuple[str, str], bool]:
        with self._lock:
            return {
                (unit_id, topic_id): judgment.about
                for (a, unit_id, topic_id), judgment in self._latest.items()
                if a == assessor
            }

    # -- API operations ---------------------------------------------------

    def next_item(self, assessor: str) -> dict:
        """The first unjudged pair in the assessor's order, with pool states."""
        order = self.session_order(assessor)
        judged = self._judged(assessor)
        total = len(order)
        position = None
        for index, pair in enumerate(order):
            if pair not in judged:
                position = index
                break
        if position is None:
            return {"status": "complete", "assessor": assessor, "judged": total, "total": total}
        unit_id, topic_id = order[position]
        pool_view = []
        for pooled_unit, pooled_topic in order:
            if pooled_unit != unit_id:
                continue
            if pooled_topic == topic_id:
                state = "current"
            elif (pooled_unit, pooled_topic) in judged:
                state = "about" if judged[(pooled_unit, pooled_topic)] else "not-about"
            else:
                state = "pending"
            pool_view.append(
                {
                    "topic_id": pooled_topic,
                    "label": self.topic_labels.get(pooled_topic, pooled_topic),
                    "state": state,
                }
            )
        return {
            "status": "ok",
            "assessor": assessor,
            "unit_id": unit_id,
            "unit_text": self.unit_texts[unit_id],
            "topic_id": topic_id,
            "topic_label": self.topic_labels.get(topic_id, topic_id),
            "judged": len(judged),
            "total": total,
            "pool": pool_view,
        }

    def submit_judgment(self, assessor: str, unit_id: str, topic_id: str, about: bool) -> dict:
        """Persist one judgment (latest wins) and acknowledge it."""
        self._require_assessor(assessor)
        if (unit_id, topic_id) not in self.pool:
            raise NotFoundError(f"pair ({unit_id!r}, {topic_id!r}) is not in the pool")
        judgment = Judgment(
            assessor=assessor,
            unit_id=unit_id,
            topic_id=topic_id,
            about=bool(about),
            timestamp=datetime.now(tz=timezone.utc),
        )
        line = json.dumps(judgment.to_record(), ensure_ascii=False, separators=(",", ":"))
        with self._lock:
            with self.judgments_path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self._latest[judgment.key] = judgment
        judged = self._judged(assessor)
        return {
            "status": "ok",
            "assessor": assessor,
            "unit_id": unit_id,
            "topic_id": topic_id,
            "about": judgment.about,
            "judged": len(judged),
            "total": len(self.session_order(assessor)),
        }

    def progress(self, assessor: str) -> dict:
        total = len(self.session_order(assessor))
        judged = len(self._judged(assessor))
        return {"assessor": assessor, "judged": judged, "total": total}

    def export_judgments(self) -> str:
        """A consistent latest-wins snapshot, parseable by the evaluation loader."""
        with self._lock:
            judgments = list(self._latest.values())
        header = f"judgments export: {len(judgments)} records, seed={self.seed}"
        return dump_judgments(judgments, header=header)


class _Handler(BaseHTTPRequestHandler):
    service: AnnotationService
    ui_dir: Path | None = None

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        log.debug("%s - %s", self.address_string(), format % args)

    # -- helpers -----------------------------------------------------------

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_text(self, text: str, content_type: str, status: int = 200) -> None:
        body = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, message: str, status: int) -> None:
        self._send_json({"status": "error", "message": message}, status=status)

    def _serve_static(self, raw_path: str) -> None:
        if self.ui_dir is None:
            if raw_path in ("/", "/index.html"):
                self._send_text(_PLACEHOLDER_PAGE, "text/html; charset=utf-8")
            else:
                self._send_error_json("not found", 404)
            return
        relative = unquote(raw_path.lstrip("/")) or "index.html"
        target = (self.ui_dir / relative).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve()) + os.sep) and target != self.ui_dir.resolve():
            self._send_error_json("not found", 404)
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send_error_json("not found", 404)
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- routes ------------------------------------------------------------

    def do_GET(self):  # noqa: N802 - stdlib naming
        path = self.path.split("?", 1)[0]
        try:
            if path.startswith("/api/session/") and path.endswith("/next"):
                assessor = unquote(path[len("/api/session/") : -len("/next")])
                self._send_json(self.service.next_item(assessor))
            elif path.startswith("/api/progress/"):
                assessor = unquote(path[len("/api/progress/") :])
                self._send_json(self.service.progress(assessor))
            elif path == "/api/export":
                self._send_text(self.service.export_judgments(), "text/plain; charset=utf-8")
            elif path.startswith("/api/"):
                self._send_error_json("unknown endpoint", 404)
            else:
                self._serve_static(path)
        except IntegrityError as exc:
            self._send_error_json(str(exc), 400)
        except NotFoundError as exc:
            self._send_error_json(str(exc), 404)
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("request failed")
            self._send_error_json(f"internal error: {exc}", 500)

    def do_POST(self):  # noqa: N802 - stdlib naming
        path = self.path.split("?", 1)[0]
        if path != "/api/judgment":
            self._send_error_json("unknown endpoint", 404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            body = json.loads(raw.decode("utf-8"))
            if not isinstance(body, dict):
                raise ValueError("body must be a JSON object")
            assessor = body["assessor"]
            unit_id = body["unit_id"]
            topic_id = body["topic_id"]
            about = body["about"]
            if not isinstance(about, bool):
                raise ValueError("'about' must be a boolean")
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            self._send_error_json(f"bad request: {exc}", 400)
            return
        try:
            self._send_json(self.service.submit_judgment(assessor, unit_id, topic_id, about))
        except NotFoundError as exc:
            self._send_error_json(str(exc), 409)
        except IntegrityError as exc:
            self._send_error_json(str(exc), 400)
        except OSError as exc:
            # Write failure: the judgment was not recorded; the client may retry.
            log.error("judgment write failed: %s", exc)
            self._send_error_json(f"write failed, retry: {exc}", 503)


def make_server(
    service: AnnotationService,
    port: int = 8080,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
) -> ThreadingHTTPServer:
    """Create (but do not start) the HTTP server bound to ``host:port``."""
    handler = type("BoundHandler", (_Handler,), {"service": service, "ui_dir": Path(ui_dir) if ui_dir else None})
    return ThreadingHTTPServer((host, port), handler)

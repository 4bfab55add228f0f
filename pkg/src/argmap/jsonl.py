"""Reading helpers for the line-delimited JSON formats used by all loaders.

Every persistent format in this toolkit (ontologies, corpora, mappings,
judgments) is a UTF-8 file of one flat JSON object per line.  Blank lines
and lines starting with ``#`` are ignored so exports may carry header
comments.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import ParseError

Source = "IO[str] | str | Path | Iterable[str]"


def open_lines(source) -> tuple[Iterable[str], str, bool]:
    """Resolve ``source`` to (line iterable, display name, needs_close).

    Accepts a filesystem path, an open text stream, or any iterable of
    strings (useful in tests).
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        handle = path.open("r", encoding="utf-8")
        return handle, path.name, True
    name = getattr(source, "name", "<stream>")
    return source, str(name), False


def iter_records(lines: Iterable[str], where: str) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)`` for each non-blank, non-comment line."""
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{where} line {lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise ParseError(f"{where} line {lineno}: expected a JSON object")
        yield lineno, record


def read_records(source) -> list[tuple[int, dict, str]]:
    """Materialize all records from ``source`` as ``(lineno, record, where)``."""
    lines, where, needs_close = open_lines(source)
    try:
        return [(lineno, record, where) for lineno, record in iter_records(lines, where)]
    finally:
        if needs_close:
            lines.close()


def get_field(record: dict, key: str, kind: type | tuple, where: str, lineno: int, optional: bool = False):
    """Fetch and type-check one field of a record, raising ParseError on violations."""
    if key not in record:
        if optional:
            return None
        raise ParseError(f"{where} line {lineno}: missing field {key!r}")
    value = record[key]
    if value is None and optional:
        return None
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{where} line {lineno}: field {key!r} must be int, got bool")
    if not isinstance(value, kind):
        kinds = kind if isinstance(kind, tuple) else (kind,)
        expected = "/".join(k.__name__ for k in kinds)
        raise ParseError(f"{where} line {lineno}: field {key!r} must be {expected}, got {type(value).__name__}")
    return value


def dump_record(record: dict) -> str:
    """Serialize one record as a compact, key-stable JSON line."""
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))

"""Report writers: JSON for structured results, CSV for plot series.

Files are written to a temporary sibling and renamed into place, so a reader
never sees a partial report. Without a path the report goes to stdout.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path

from pydantic import BaseModel

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info("wrote %s", path)


def emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def render_json(payload: BaseModel | dict, kind: str) -> str:
    """Versioned JSON document: {"schema": ..., "kind": ..., "report": ...}."""
    body = payload.model_dump(mode="json") if isinstance(payload, BaseModel) else payload
    document = {"schema": REPORT_SCHEMA_VERSION, "kind": kind, "report": body}
    return json.dumps(document, indent=2, sort_keys=False) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_json(payload: BaseModel | dict, kind: str, path: Path | None) -> None:
    emit(render_json(payload, kind), path)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[object]], path: Path | None) -> None:
    emit(render_csv(header, rows), path)


def read_json(path: str | Path) -> dict:
    with open(path) as f:
        return json.load(f)

"""Dataset files, transform serialization, and report documents.

Two vector formats are supported: fvecs (records of a little-endian
int32 dimension followed by that many little-endian float32 values, the
common ANN-benchmark interchange format) and csv (one point per row).
Loading always routes through make_dataset, so points come back padded
to a power of two with d_orig recording the file's width.
"""

from __future__ import annotations

import dataclasses
import json
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import DataSet, make_dataset
from .errors import DimensionMismatch, ParseError
from .fjlt import FjltTransform, transform_from_dict, transform_to_dict

REPORT_SCHEMA_VERSION = 1
DATASET_FORMATS = ("fvecs", "csv")


def _load_fvecs(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if not raw:
        raise ParseError(f"{path}: empty file")
    if len(raw) % 4:
        raise ParseError(f"{path}: size {len(raw)} is not a multiple of 4 bytes")
    words = np.frombuffer(raw, dtype="<i4")
    d0 = int(words[0])
    if d0 <= 0:
        raise ParseError(f"{path}: record 0 at byte 0 declares dimension {d0}")
    if len(words) % (d0 + 1):
        # Misaligned file: walk record by record to locate the fault.
        off, idx = 0, 0
        while off < len(words):
            dim = int(words[off])
            if dim <= 0:
                raise ParseError(f"{path}: record {idx} at byte {4 * off} declares dimension {dim}")
            if off + 1 + dim > len(words):
                raise ParseError(f"{path}: record {idx} at byte {4 * off} is truncated")
            if dim != d0:
                raise DimensionMismatch(
                    f"{path}: record {idx} at byte {4 * off} has dimension {dim}, expected {d0}"
                )
            off += 1 + dim
            idx += 1
        raise ParseError(f"{path}: malformed record structure")
    table = words.reshape(-1, d0 + 1)
    dims = table[:, 0]
    if not (dims == d0).all():
        bad = int(np.argmax(dims != d0))
        raise DimensionMismatch(
            f"{path}: record {bad} at byte {4 * bad * (d0 + 1)} has dimension {int(dims[bad])}, expected {d0}"
        )
    return np.ascontiguousarray(table[:, 1:]).view("<f4").astype(np.float64)


def _load_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            row = []
            for col, token in enumerate(stripped.split(","), start=1):
                try:
                    row.append(float(token))
                except ValueError:
                    raise ParseError(
                        f"{path}: line {lineno}, field {col}: {token.strip()!r} is not a number"
                    ) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DimensionMismatch(
                    f"{path}: line {lineno} has {len(row)} fields, expected {width}"
                )
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_dataset(path: str | Path, format: str = "fvecs") -> DataSet:
    """Read a vector file and return a padded DataSet."""
    path = Path(path)
    if format == "fvecs":
        points = _load_fvecs(path)
    elif format == "csv":
        points = _load_csv(path)
    else:
        raise ParseError(f"unknown dataset format {format!r}; choose from {', '.join(DATASET_FORMATS)}")
    return make_dataset(points)


def save_dataset(dataset: DataSet, path: str | Path, format: str = "fvecs") -> None:
    """Write the unpadded columns of a DataSet (labels are not stored)."""
    path = Path(path)
    points = dataset.points[:, : dataset.d_orig]
    if format == "fvecs":
        n, d = points.shape
        table = np.empty((n, d + 1), dtype="<i4")
        table[:, 0] = d
        table[:, 1:] = points.astype("<f4").view("<i4")
        path.write_bytes(table.tobytes())
    elif format == "csv":
        np.savetxt(path, points, delimiter=",", fmt="%.17g")
    else:
        raise ParseError(f"unknown dataset format {format!r}; choose from {', '.join(DATASET_FORMATS)}")


def save_transform(transform: FjltTransform, path: str | Path) -> None:
    Path(path).write_text(json.dumps(transform_to_dict(transform), indent=2, sort_keys=True) + "\n")


def load_transform(path: str | Path) -> FjltTransform:
    path = Path(path)
    try:
        blob = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return transform_from_dict(blob)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: malformed transform document ({exc})") from None


def utc_timestamp() -> str:
    """ISO timestamp; honors SOURCE_DATE_EPOCH for reproducible output."""
    pinned = os.environ.get("SOURCE_DATE_EPOCH")
    if pinned is not None:
        moment = datetime.fromtimestamp(int(pinned), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.isoformat(timespec="seconds")


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, parameters: dict, payload) -> dict:
    """Self-describing result wrapper: rerunning the echoed command and
    parameters must reproduce the payload."""
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "created_at": utc_timestamp(),
        "payload": payload,
    }


def dump_report(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"


def write_report(report, path: str | Path | None) -> str:
    """Serialize a report; write it to path when given. Returns the text."""
    text = dump_report(report)
    if path is not None:
        Path(path).write_text(text)
    return text

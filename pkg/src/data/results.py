"""
Result persistence for experiment runs.
Writes summary and bound-check rows as CSV (with a commented metadata
header) or as a JSON array with a sibling metadata file.
"""

import io
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Type, Union

import pandas as pd

from .models import BoundCheckRow, OutputFormat, SummaryRow
from ..core.exceptions import EmitError, UsageError

logger = logging.getLogger(__name__)

Row = Union[SummaryRow, BoundCheckRow]
STDOUT = "-"


def _row_type(rows: Sequence[Row], row_type: Optional[Type]) -> Type:
    if rows:
        return type(rows[0])
    return row_type or SummaryRow


def _frame(rows: Sequence[Row], row_type: Type) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in rows], columns=list(row_type.COLUMNS))


def _csv_text(rows: Sequence[Row], row_type: Type, meta: Dict[str, Any]) -> str:
    buffer = io.StringIO()
    for key, value in meta.items():
        buffer.write(f"# {key}: {value}\n")
    _frame(rows, row_type).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def _json_text(rows: Sequence[Row]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2) + "\n"


def _write(path: str, text: str):
    if path == STDOUT:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        logger.error(f"Failed to write results to {path}: {e}")
        raise EmitError(f"Cannot write {path}: {e}", error_code="WRITE_FAILED", details={"path": path})


def emit(rows: Sequence[Row], format: Union[OutputFormat, str], path: Optional[str] = None,
         meta: Optional[Dict[str, Any]] = None, row_type: Optional[Type] = None) -> Optional[str]:
    """
    Write rows to `path` (stdout when None or '-').

    CSV: '# key: value' lines, the column header, one line per row.
    JSON: an array of row objects; metadata goes to '<path>.meta.json'.
    Returns the path written, or None for stdout.
    """
    format = OutputFormat(format) if isinstance(format, str) else format
    row_type = _row_type(rows, row_type)
    meta = dict(meta or {})
    path = path or STDOUT

    if format is OutputFormat.CSV:
        _write(path, _csv_text(rows, row_type, meta))
    else:
        _write(path, _json_text(rows))
        if path != STDOUT:
            _write(f"{path}.meta.json", json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")

    logger.info(f"Wrote {len(rows)} {row_type.__name__} rows to {path if path != STDOUT else 'stdout'}")
    return None if path == STDOUT else path


def _infer_type(columns: Sequence[str]) -> Type:
    if "metric" in columns:
        return SummaryRow
    if "verdict" in columns:
        return BoundCheckRow
    raise EmitError(f"Unrecognized result columns {list(columns)}", error_code="BAD_COLUMNS")


def load_rows(path: str) -> List[Row]:
    """Re-parse an emitted CSV or JSON file into row objects"""
    if not os.path.exists(path):
        raise EmitError(f"No result file at {path}", error_code="NOT_FOUND", details={"path": path})

    try:
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as handle:
                records = json.load(handle)
            if not records:
                return []
            row_type = _infer_type(list(records[0]))
            return [row_type.from_dict(r) for r in records]

        frame = pd.read_csv(
            path, comment="#", float_precision="round_trip",
            dtype={"ensemble": str, "metric": str, "bound": str, "params": str, "observable": str},
            keep_default_na=False,
        )
    except (OSError, ValueError) as e:
        raise EmitError(f"Cannot read {path}: {e}", error_code="READ_FAILED", details={"path": path})

    row_type = _infer_type(list(frame.columns))
    return [row_type.from_dict(record) for record in frame.to_dict(orient="records")]


def create_metadata(generator: str, seed: int, trials: int, version: str, **extra: Any) -> Dict[str, Any]:
    """Header fields recorded with every result file"""
    meta = {
        "generator": generator,
        "seed": seed,
        "trials": trials,
        "library_version": version,
        "std": "population (ddof=0) over the trial batch",
    }
    meta.update(extra)
    return meta


def check_format(value: str) -> OutputFormat:
    try:
        return OutputFormat(value.lower())
    except ValueError:
        raise UsageError(f"Unknown output format {value!r}", error_code="BAD_FORMAT")

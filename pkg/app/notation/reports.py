"""
CSV and JSON report writers.

Every CSV report has a named, versioned column schema. The schema version is
recorded in the run manifest next to the file name.
"""
import csv
import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from app.core.exceptions import RecordIOError
from app.core.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ReportSchema:
    name: str
    version: int
    columns: tuple[str, ...]


_SCHEMAS = (
    ReportSchema("perft", 1, ("variant", "fen", "depth", "move", "nodes")),
    ReportSchema(
        "replay",
        1,
        (
            "game", "variant", "plies", "legal", "illegal_ply",
            "final_state", "final_reason", "result_ok", "error",
        ),
    ),
    ReportSchema(
        "outcomes_summary",
        1,
        (
            "set", "n_win", "n_draw", "n_lose", "n", "empirical_score",
            "mean_win", "win_lo", "win_hi",
            "mean_draw", "draw_lo", "draw_hi",
            "mean_lose", "lose_lo", "lose_hi",
            "mean_score", "score_lo", "score_hi",
        ),
    ),
    ReportSchema(
        "outcomes_comparison",
        1,
        ("statistic", "a", "b", "probability", "samples", "seed"),
    ),
    ReportSchema(
        "diversity",
        1,
        (
            "ply", "samples", "entropy", "entropy_se", "equivalent_sequences",
            "candidates", "candidates_se", "iida_ratio",
        ),
    ),
    ReportSchema("histogram", 1, ("view", "bin_lo", "bin_hi", "count")),
    ReportSchema(
        "kl",
        1,
        ("variant_p", "variant_q", "plies", "samples", "mode", "nats", "stderr"),
    ),
    ReportSchema(
        "candidates",
        1,
        (
            "ply", "samples", "additional", "additional_se", "m_p", "m_q", "m_r",
            "bound_violations", "min_slack", "max_slack",
        ),
    ),
    ReportSchema("piece_values", 1, ("parameter", "weight", "normalized")),
    ReportSchema(
        "utilization",
        1,
        (
            "variant", "feature", "games_with", "game_fraction",
            "moves", "move_fraction", "n_games", "n_moves",
        ),
    ),
    ReportSchema("lengths", 1, ("view", "bucket_lo", "bucket_hi", "count")),
    ReportSchema(
        "opening_eval",
        1,
        (
            "opening", "variant", "games", "wins", "draws", "losses",
            "expected_score", "score_lo", "score_hi",
        ),
    ),
)

REPORT_SCHEMAS: dict[str, ReportSchema] = {s.name: s for s in _SCHEMAS}


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(round(value, 12))
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return value


def write_csv_report(path: str | Path, schema: str, rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write ``rows`` under the named schema.

    Raises:
        RecordIOError: If the file cannot be written.
        KeyError: If the schema is unknown or a row carries unknown columns.
    """
    layout = REPORT_SCHEMAS[schema]
    path = Path(path)
    count = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=layout.columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                unknown = set(row) - set(layout.columns)
                if unknown:
                    raise KeyError(f"Columns {sorted(unknown)} are not in schema '{schema}'")
                writer.writerow({k: _cell(v) for k, v in row.items()})
                count += 1
    except OSError as exc:
        raise RecordIOError(f"Cannot write '{path}': {exc}") from exc
    logger.debug("Wrote %d row(s) of '%s' v%d to %s", count, schema, layout.version, path)
    return path


def write_json_report(path: str | Path, payload: Mapping[str, Any]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise RecordIOError(f"Cannot write '{path}': {exc}") from exc
    return path

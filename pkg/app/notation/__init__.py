from app.notation.fen import STANDARD_START, parse_fen, serialize_fen
from app.notation.lan import parse_lan, resolve_san, serialize_lan
from app.notation.records import (
    Replay,
    read_game_records,
    replay_game,
    write_game_records,
)
from app.notation.reports import REPORT_SCHEMAS, write_csv_report, write_json_report

__all__ = [
    "REPORT_SCHEMAS",
    "Replay",
    "STANDARD_START",
    "parse_fen",
    "parse_lan",
    "read_game_records",
    "replay_game",
    "resolve_san",
    "serialize_fen",
    "serialize_lan",
    "write_csv_report",
    "write_game_records",
    "write_json_report",
]

"""
JSON-lines game record files and game replay.

Writers append one record per line and flush after each game, so an
interrupted generation run leaves a readable file.
"""
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import ValidationError

from app.core.exceptions import FenSyntaxError, IllegalMoveError, RecordIOError
from app.core.logging import get_logger
from app.notation.fen import parse_fen, serialize_fen
from app.notation.lan import parse_lan
from app.rules.movegen import make_move
from app.rules.position import Position, repetition_key
from app.rules.status import GameState, GameStatus, TerminationReason, classify
from app.rules.types import Move
from app.schemas.game import GameRecord

logger = get_logger(__name__)


def iter_game_records(path: str | Path) -> Iterator[GameRecord]:
    """Yield records from a ``games.jsonl`` file; blank lines are skipped.

    Raises:
        RecordIOError: If the file cannot be read or a line is not a record.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    yield GameRecord.model_validate_json(line)
                except ValidationError as exc:
                    raise RecordIOError(
                        f"{path}:{number}: not a game record ({exc.error_count()} errors)"
                    ) from exc
    except OSError as exc:
        raise RecordIOError(f"Cannot read '{path}': {exc}") from exc


def read_game_records(path: str | Path) -> list[GameRecord]:
    records = list(iter_game_records(path))
    logger.debug("Read %d record(s) from %s", len(records), path)
    return records


def write_game_records(
    path: str | Path, records: Iterable[GameRecord], append: bool = True
) -> int:
    """Write records as JSON lines.

    Args:
        path: Target file; parent directories are created.
        records: Records to write.
        append: Append to an existing file instead of truncating it.

    Returns:
        Number of records written.
    """
    path = Path(path)
    count = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a" if append else "w", encoding="utf-8", newline="\n") as handle:
            for record in records:
                handle.write(record.model_dump_json() + "\n")
                handle.flush()
                count += 1
    except OSError as exc:
        raise RecordIOError(f"Cannot write '{path}': {exc}") from exc
    logger.debug("Wrote %d record(s) to %s", count, path)
    return count


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


@dataclass
class Replay:
    """Positions and moves of a replayed game.

    ``positions`` holds the start position and the position after each move,
    so it is one longer than ``moves``.
    """

    positions: list[Position] = field(default_factory=list)
    moves: list[Move] = field(default_factory=list)
    status: GameStatus | None = None
    illegal_ply: int | None = None
    error: str | None = None

    @property
    def legal(self) -> bool:
        return self.illegal_ply is None


def replay_moves(start: Position, lans: Iterable[str]) -> Replay:
    """Replay LAN moves from ``start``, stopping at the first illegal one."""
    replay = Replay(positions=[start])
    history: dict = {repetition_key(start): 1}
    position = start
    status = classify(position, 1)
    for ply, text in enumerate(lans, start=1):
        try:
            move = parse_lan(position, text)
        except (IllegalMoveError, FenSyntaxError) as exc:
            replay.illegal_ply = ply
            replay.error = str(exc)
            break
        position = make_move(position, move)
        key = repetition_key(position)
        history[key] = history.get(key, 0) + 1
        replay.moves.append(move)
        replay.positions.append(position)
        status = classify(position, history[key])
    replay.status = status
    return replay


def replay_game(record: GameRecord) -> Replay:
    """Replay a record from its start FEN.

    Raises:
        IllegalMoveError: If a move is illegal; the message names the ply.
    """
    start = parse_fen(record.start_fen, record.variant)
    replay = replay_moves(start, (m.lan for m in record.moves))
    if not replay.legal:
        raise IllegalMoveError(
            record.moves[replay.illegal_ply - 1].lan,
            serialize_fen(replay.positions[-1]),
            ply=replay.illegal_ply,
        )
    return replay


def result_consistent(record: GameRecord, replay: Replay) -> bool:
    """Whether the stored result agrees with the replayed final status.

    Capped games must end in a non-terminal position and be scored as a draw
    without a reason.
    """
    status = replay.status
    if status is None:
        return False
    if record.capped:
        return (
            not status.is_terminal
            and record.result.state is GameState.DRAW
            and record.result.reason is TerminationReason.NONE
        )
    return status.state is record.result.state and status.reason is record.result.reason

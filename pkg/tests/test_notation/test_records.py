import pytest

from app.core.exceptions import IllegalMoveError, RecordIOError
from app.notation.fen import STANDARD_START
from app.notation.records import (
    iter_game_records,
    read_game_records,
    replay_game,
    replay_moves,
    result_consistent,
    write_game_records,
)
from app.rules import GameState, TerminationReason, initial_position
from app.schemas.game import GameRecord, GameResult, MoveEntry, PlyInfo


def _record(lans: list[str], state: GameState, reason: TerminationReason, **extra) -> GameRecord:
    return GameRecord(
        variant="classical",
        start_fen=STANDARD_START + " variant=classical",
        moves=[MoveEntry(lan=lan) for lan in lans],
        result=GameResult(state=state, reason=reason),
        **extra,
    )


@pytest.fixture
def mate_record(fools_mate) -> GameRecord:
    return _record(fools_mate, GameState.BLACK_WINS, TerminationReason.CHECKMATE, seed=4)


# ---------------------------------------------------------------------------
# JSON lines
# ---------------------------------------------------------------------------


def test_write_then_read(tmp_path, mate_record) -> None:
    path = tmp_path / "games.jsonl"
    assert write_game_records(path, [mate_record, mate_record]) == 2
    records = read_game_records(path)
    assert records == [mate_record, mate_record]
    assert records[0].plies == 4
    assert records[0].decisive


def test_append_and_truncate(tmp_path, mate_record) -> None:
    path = tmp_path / "nested" / "games.jsonl"
    write_game_records(path, [mate_record])
    write_game_records(path, [mate_record])
    assert len(read_game_records(path)) == 2
    write_game_records(path, [mate_record], append=False)
    assert len(read_game_records(path)) == 1


def test_one_record_per_line(tmp_path, mate_record) -> None:
    path = tmp_path / "games.jsonl"
    write_game_records(path, [mate_record] * 3)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("{")


def test_blank_lines_skipped(tmp_path, mate_record) -> None:
    path = tmp_path / "games.jsonl"
    path.write_text("\n" + mate_record.model_dump_json() + "\n\n", encoding="utf-8")
    assert len(list(iter_game_records(path))) == 1


def test_bad_line_names_its_number(tmp_path, mate_record) -> None:
    path = tmp_path / "games.jsonl"
    path.write_text(mate_record.model_dump_json() + "\n{\"variant\": 3}\n", encoding="utf-8")
    with pytest.raises(RecordIOError, match=":2:"):
        read_game_records(path)


def test_missing_file(tmp_path) -> None:
    with pytest.raises(RecordIOError):
        read_game_records(tmp_path / "absent.jsonl")


def test_per_ply_length_checked() -> None:
    with pytest.raises(ValueError):
        _record(
            ["e2e4"],
            GameState.DRAW,
            TerminationReason.NONE,
            capped=True,
            per_ply=[],
        )
    record = _record(
        ["e2e4"],
        GameState.DRAW,
        TerminationReason.NONE,
        capped=True,
        per_ply=[PlyInfo(visits={"e2e4": 3, "d2d4": 1}, chosen_by="softmax")],
    )
    assert record.per_ply[0].visits["e2e4"] == 3


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def test_replay_game_reaches_mate(mate_record) -> None:
    replay = replay_game(mate_record)
    assert replay.legal
    assert len(replay.positions) == len(replay.moves) + 1 == 5
    assert replay.status.state is GameState.BLACK_WINS
    assert replay.status.reason is TerminationReason.CHECKMATE
    assert result_consistent(mate_record, replay)


def test_replay_moves_stops_at_first_illegal_move() -> None:
    replay = replay_moves(initial_position("classical"), ["e2e4", "e7e5", "e4e5", "g1f3"])
    assert not replay.legal
    assert replay.illegal_ply == 3
    assert len(replay.moves) == 2
    assert replay.error


def test_replay_game_raises_with_ply() -> None:
    record = _record(["e2e4", "e2e4"], GameState.DRAW, TerminationReason.NONE, capped=True)
    with pytest.raises(IllegalMoveError) as excinfo:
        replay_game(record)
    assert excinfo.value.ply == 2
    assert excinfo.value.move == "e2e4"


def test_inconsistent_result_detected(fools_mate) -> None:
    wrong = _record(fools_mate, GameState.WHITE_WINS, TerminationReason.CHECKMATE)
    assert not result_consistent(wrong, replay_game(wrong))


def test_capped_game_must_be_unfinished_draw(fools_mate) -> None:
    capped = _record(["e2e4"], GameState.DRAW, TerminationReason.NONE, capped=True)
    assert result_consistent(capped, replay_game(capped))
    capped_mate = _record(fools_mate, GameState.DRAW, TerminationReason.NONE, capped=True)
    assert not result_consistent(capped_mate, replay_game(capped_mate))


def test_replay_uses_record_variant() -> None:
    record = GameRecord(
        variant="pawnonesquare",
        start_fen=STANDARD_START,
        moves=[MoveEntry(lan="e2e4")],
        result=GameResult(state=GameState.DRAW),
        capped=True,
    )
    with pytest.raises(IllegalMoveError):
        replay_game(record)

"""
Conformance corpus of transcribed games (``data/corpus/*.json``).

Each file holds one game in SAN or LAN, its stated result, optional board
checkpoints and, where the game ended formally, the expected terminal status.
"""
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from app.core.exceptions import FenSyntaxError, IllegalMoveError, RecordIOError
from app.core.logging import get_logger
from app.notation.fen import parse_fen, serialize_placement
from app.notation.lan import parse_lan, resolve_san
from app.rules.movegen import make_move
from app.rules.position import initial_position, repetition_key
from app.rules.status import GameState, GameStatus, TerminationReason, classify
from app.rules.types import VariantId

logger = get_logger(__name__)

CORPUS_DIR = Path(__file__).resolve().parents[2] / "data" / "corpus"

_RESULT_STATES = {
    "1-0": GameState.WHITE_WINS,
    "0-1": GameState.BLACK_WINS,
    "1/2-1/2": GameState.DRAW,
    "*": GameState.ONGOING,
}


class Checkpoint(BaseModel):
    after_ply: int = Field(..., ge=0)
    board: str = Field(..., description="FEN piece placement")


class TerminalStatus(BaseModel):
    state: GameState
    reason: TerminationReason


class CorpusGame(BaseModel):
    id: str
    variant: VariantId
    notation: Literal["san", "lan"]
    result: Literal["1-0", "0-1", "1/2-1/2", "*"]
    start_fen: Optional[str] = None
    moves: str
    checkpoints: list[Checkpoint] = Field(default_factory=list)
    terminal: Optional[TerminalStatus] = None

    @property
    def tokens(self) -> list[str]:
        return self.moves.split()


class CorpusCheck(BaseModel):
    """Outcome of replaying one corpus game."""

    id: str
    variant: VariantId
    plies: int
    legal: bool
    illegal_ply: Optional[int] = None
    error: Optional[str] = None
    final_state: Optional[GameState] = None
    final_reason: Optional[TerminationReason] = None
    checkpoints_ok: bool = True
    result_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.legal and self.checkpoints_ok and self.result_ok


def load_corpus(directory: str | Path = CORPUS_DIR) -> list[CorpusGame]:
    directory = Path(directory)
    games = []
    try:
        for path in sorted(directory.glob("*.json")):
            try:
                games.append(CorpusGame.model_validate_json(path.read_text(encoding="utf-8")))
            except ValidationError as exc:
                raise RecordIOError(f"{path}: not a corpus game") from exc
    except OSError as exc:
        raise RecordIOError(f"Cannot read corpus '{directory}': {exc}") from exc
    logger.debug("Loaded %d corpus game(s) from %s", len(games), directory)
    return games


def _status_agrees(game: CorpusGame, status: GameStatus) -> bool:
    if game.terminal is not None:
        return status.state is game.terminal.state and status.reason is game.terminal.reason
    # Games may stop before a formal ending (resignation, agreed draw).
    return status.state is GameState.ONGOING or status.state is _RESULT_STATES[game.result]


def check_corpus_game(game: CorpusGame) -> CorpusCheck:
    """Replay a corpus game move by move and compare it with its annotations."""
    position = (
        parse_fen(game.start_fen, game.variant)
        if game.start_fen
        else initial_position(game.variant)
    )
    resolve = resolve_san if game.notation == "san" else parse_lan
    expected_boards = {c.after_ply: c.board for c in game.checkpoints}
    history = {repetition_key(position): 1}
    status = classify(position, 1)
    check = CorpusCheck(id=game.id, variant=game.variant, plies=0, legal=True)

    if 0 in expected_boards and serialize_placement(position.board) != expected_boards[0]:
        check.checkpoints_ok = False

    for ply, token in enumerate(game.tokens, start=1):
        try:
            move = resolve(position, token)
        except (IllegalMoveError, FenSyntaxError) as exc:
            check.legal = False
            check.illegal_ply = ply
            check.error = str(exc)
            break
        position = make_move(position, move)
        key = repetition_key(position)
        history[key] = history.get(key, 0) + 1
        status = classify(position, history[key])
        check.plies = ply
        board = expected_boards.get(ply)
        if board is not None and serialize_placement(position.board) != board:
            check.checkpoints_ok = False
            check.error = check.error or f"Board mismatch after ply {ply}"

    check.final_state = status.state
    check.final_reason = status.reason
    check.result_ok = check.legal and _status_agrees(game, status)
    return check

"""
Game termination: mate, stalemate, the fifty-move rule and repetition.

Insufficient material is never adjudicated in any variant.
"""
from collections.abc import Hashable, Sequence
from dataclasses import dataclass
from enum import Enum

from app.rules.movegen import in_check, legal_moves
from app.rules.position import Position, repetition_key
from app.rules.types import Color

FIFTY_MOVE_PLIES = 100
REPETITION_COUNT = 3


class GameState(str, Enum):
    ONGOING = "ongoing"
    WHITE_WINS = "white_wins"
    BLACK_WINS = "black_wins"
    DRAW = "draw"

    @classmethod
    def win_for(cls, color: Color) -> "GameState":
        return cls.WHITE_WINS if color is Color.WHITE else cls.BLACK_WINS

    @property
    def result(self) -> str:
        """PGN-style result token."""
        return {
            GameState.WHITE_WINS: "1-0",
            GameState.BLACK_WINS: "0-1",
            GameState.DRAW: "1/2-1/2",
            GameState.ONGOING: "*",
        }[self]


class TerminationReason(str, Enum):
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    FIFTY_MOVE = "fifty_move"
    THREEFOLD_REPETITION = "threefold_repetition"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class GameStatus:
    state: GameState
    reason: TerminationReason

    @property
    def is_terminal(self) -> bool:
        return self.state is not GameState.ONGOING

    @property
    def decisive(self) -> bool:
        return self.state in (GameState.WHITE_WINS, GameState.BLACK_WINS)


ONGOING = GameStatus(GameState.ONGOING, TerminationReason.NONE)


def classify(p: Position, occurrences: int) -> GameStatus:
    """Status of ``p`` given how many times its repetition key has occurred.

    ``occurrences`` includes the current position. Mate and stalemate take
    precedence over the fifty-move rule and repetition.
    """
    if not legal_moves(p):
        if in_check(p):
            return GameStatus(GameState.win_for(p.side.other), TerminationReason.CHECKMATE)
        if p.variant.stalemate_wins:
            return GameStatus(GameState.win_for(p.side.other), TerminationReason.STALEMATE)
        return GameStatus(GameState.DRAW, TerminationReason.STALEMATE)

    if p.halfmove >= FIFTY_MOVE_PLIES:
        return GameStatus(GameState.DRAW, TerminationReason.FIFTY_MOVE)
    if occurrences >= REPETITION_COUNT:
        return GameStatus(GameState.DRAW, TerminationReason.THREEFOLD_REPETITION)
    return ONGOING


def status(p: Position, history: Sequence[Hashable] = ()) -> GameStatus:
    """Status of ``p``.

    Args:
        p: Current position.
        history: Repetition keys of all earlier positions of the game, the
            current one excluded.

    Returns:
        GameStatus with the winner (if any) and the termination reason.
    """
    key = repetition_key(p)
    return classify(p, sum(1 for k in history if k == key) + 1)


__all__ = [
    "FIFTY_MOVE_PLIES",
    "GameState",
    "GameStatus",
    "ONGOING",
    "TerminationReason",
    "classify",
    "in_check",
    "status",
]

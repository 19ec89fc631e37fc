from app.rules.movegen import apply_move, in_check, legal_moves, make_move
from app.rules.perft import divide, perft
from app.rules.position import Position, initial_position, repetition_key
from app.rules.status import GameState, GameStatus, TerminationReason, status
from app.rules.types import (
    ALL_VARIANTS,
    Color,
    Move,
    MoveFlag,
    Piece,
    PieceKind,
    VariantConfig,
    VariantId,
)

__all__ = [
    "ALL_VARIANTS",
    "Color",
    "GameState",
    "GameStatus",
    "Move",
    "MoveFlag",
    "Piece",
    "PieceKind",
    "Position",
    "TerminationReason",
    "VariantConfig",
    "VariantId",
    "apply_move",
    "divide",
    "in_check",
    "initial_position",
    "legal_moves",
    "make_move",
    "perft",
    "repetition_key",
    "status",
]

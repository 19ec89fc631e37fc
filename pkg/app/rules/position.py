"""
Immutable game state shared by every variant.
"""
from dataclasses import dataclass, replace
from typing import Hashable

from app.rules.types import (
    Color,
    Piece,
    PieceKind,
    Square,
    VariantConfig,
    VariantId,
    square,
)

CASTLING_ORDER = "KQkq"

_BACK_RANK = (
    PieceKind.ROOK,
    PieceKind.KNIGHT,
    PieceKind.BISHOP,
    PieceKind.QUEEN,
    PieceKind.KING,
    PieceKind.BISHOP,
    PieceKind.KNIGHT,
    PieceKind.ROOK,
)


def canonical_castling(rights: str) -> str:
    return "".join(c for c in CASTLING_ORDER if c in rights)


@dataclass(frozen=True, slots=True)
class Position:
    """Full state of a game in progress.

    ``plies`` counts half-moves played since the game start. It only drives the
    castling ban of the delayed-castling variant, but it is tracked for every
    variant so positions stay comparable.
    """

    board: tuple[Piece | None, ...]
    side: Color
    castling: str
    ep: Square | None
    halfmove: int
    fullmove: int
    variant: VariantConfig
    plies: int = 0

    def piece_at(self, sq: Square) -> Piece | None:
        return self.board[sq]

    def king_square(self, color: Color) -> Square:
        king = Piece.of(color, PieceKind.KING)
        return self.board.index(king)

    def with_variant(self, variant: VariantConfig | VariantId | str) -> "Position":
        if not isinstance(variant, VariantConfig):
            variant = VariantConfig.of(variant)
        return replace(self, variant=variant)

    @property
    def effective_castling(self) -> str:
        return self.castling if self.variant.castling_allowed else ""


def initial_position(variant: VariantConfig | VariantId | str) -> Position:
    if not isinstance(variant, VariantConfig):
        variant = VariantConfig.of(variant)

    board: list[Piece | None] = [None] * 64
    for file, kind in enumerate(_BACK_RANK):
        board[square(file, 0)] = Piece.of(Color.WHITE, kind)
        board[square(file, 1)] = Piece.of(Color.WHITE, PieceKind.PAWN)
        board[square(file, 6)] = Piece.of(Color.BLACK, PieceKind.PAWN)
        board[square(file, 7)] = Piece.of(Color.BLACK, kind)

    return Position(
        board=tuple(board),
        side=Color.WHITE,
        castling=CASTLING_ORDER,
        ep=None,
        halfmove=0,
        fullmove=1,
        variant=variant,
        plies=0,
    )


def repetition_key(p: Position) -> Hashable:
    """Identity of a position for repetition counting; move counters excluded."""
    return (p.board, p.side, p.effective_castling, p.ep)


MATERIAL_KINDS = (
    PieceKind.PAWN,
    PieceKind.KNIGHT,
    PieceKind.BISHOP,
    PieceKind.ROOK,
    PieceKind.QUEEN,
)


def material_difference(p: Position) -> tuple[int, ...]:
    """Per-kind count difference (pawn..queen), side to move minus opponent."""
    diff = [0] * len(MATERIAL_KINDS)
    for piece in p.board:
        if piece is None or piece.kind is PieceKind.KING:
            continue
        diff[piece.kind - 1] += 1 if piece.color is p.side else -1
    return tuple(diff)

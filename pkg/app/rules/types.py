"""
Core value types: squares, pieces, moves and variant configurations.

Squares are plain ints 0..63 (file + 8 * rank, rank 0 is White's first rank),
so their natural order is the canonical total order.
"""
from dataclasses import dataclass, field
from enum import Enum, Flag, IntEnum, auto
from functools import cache

Square = int

FILE_NAMES = "abcdefgh"
RANK_NAMES = "12345678"


def square(file: int, rank: int) -> Square:
    return file + 8 * rank


def file_of(sq: Square) -> int:
    return sq & 7


def rank_of(sq: Square) -> int:
    return sq >> 3


def square_name(sq: Square) -> str:
    return FILE_NAMES[sq & 7] + RANK_NAMES[sq >> 3]


def parse_square(name: str) -> Square:
    if len(name) != 2 or name[0] not in FILE_NAMES or name[1] not in RANK_NAMES:
        raise ValueError(f"Not a square: '{name}'")
    return square(FILE_NAMES.index(name[0]), RANK_NAMES.index(name[1]))


class Color(IntEnum):
    WHITE = 0
    BLACK = 1

    @property
    def other(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE

    @property
    def forward(self) -> int:
        """Square offset of one step towards the opponent."""
        return 8 if self is Color.WHITE else -8

    def relative_rank(self, rank: int) -> int:
        return rank if self is Color.WHITE else 7 - rank


class PieceKind(IntEnum):
    PAWN = 1
    KNIGHT = 2
    BISHOP = 3
    ROOK = 4
    QUEEN = 5
    KING = 6

    @property
    def symbol(self) -> str:
        return " pnbrqk"[self]

    @classmethod
    def from_symbol(cls, symbol: str) -> "PieceKind":
        index = " pnbrqk".find(symbol.lower())
        if index <= 0:
            raise ValueError(f"Not a piece letter: '{symbol}'")
        return cls(index)


PROMOTION_KINDS = (PieceKind.QUEEN, PieceKind.ROOK, PieceKind.BISHOP, PieceKind.KNIGHT)


@dataclass(frozen=True, slots=True)
class Piece:
    color: Color
    kind: PieceKind

    @staticmethod
    @cache
    def of(color: Color, kind: PieceKind) -> "Piece":
        return Piece(color, kind)

    @property
    def symbol(self) -> str:
        s = self.kind.symbol
        return s.upper() if self.color is Color.WHITE else s

    @classmethod
    def from_symbol(cls, symbol: str) -> "Piece":
        color = Color.WHITE if symbol.isupper() else Color.BLACK
        return cls.of(color, PieceKind.from_symbol(symbol))


class MoveFlag(Flag):
    QUIET = 0
    CAPTURE = auto()
    SELF_CAPTURE = auto()
    DOUBLE_PUSH = auto()
    EN_PASSANT = auto()
    CASTLE_SHORT = auto()
    CASTLE_LONG = auto()
    LATERAL = auto()
    BACKWARD = auto()

    @property
    def names(self) -> list[str]:
        return [f.name.lower() for f in MoveFlag if f in self]

    @classmethod
    def from_names(cls, names: list[str]) -> "MoveFlag":
        flags = cls.QUIET
        for name in names:
            flags |= cls[name.upper()]
        return flags


@dataclass(frozen=True, slots=True)
class Move:
    from_sq: Square
    to_sq: Square
    promotion: PieceKind | None = None
    flags: MoveFlag = MoveFlag.QUIET

    @property
    def lan(self) -> str:
        text = square_name(self.from_sq) + square_name(self.to_sq)
        if self.promotion is not None:
            text += self.promotion.symbol
        return text

    @property
    def key(self) -> tuple[Square, Square, PieceKind | None]:
        return (self.from_sq, self.to_sq, self.promotion)

    def __str__(self) -> str:
        return self.lan


class VariantId(str, Enum):
    CLASSICAL = "classical"
    NOCASTLING = "nocastling"
    NOCASTLING10 = "nocastling10"
    PAWNONESQUARE = "pawnonesquare"
    STALEMATEWIN = "stalematewin"
    TORPEDO = "torpedo"
    SEMITORPEDO = "semitorpedo"
    PAWNBACK = "pawnback"
    PAWNSIDEWAYS = "pawnsideways"
    SELFCAPTURE = "selfcapture"


# Relative ranks a pawn may start a two-square advance from.
_DOUBLE_PUSH_RANKS: dict[VariantId, frozenset[int]] = {
    VariantId.PAWNONESQUARE: frozenset(),
    VariantId.TORPEDO: frozenset({1, 2, 3, 4, 5}),
    VariantId.SEMITORPEDO: frozenset({1, 2}),
}


@dataclass(frozen=True)
class VariantConfig:
    """Rule set of one variant. Every field is derived from ``id``."""

    id: VariantId
    castling_ban_plies: int = field(init=False)
    castling_allowed: bool = field(init=False)
    double_push_ranks: frozenset[int] = field(init=False)
    backward_moves: bool = field(init=False)
    lateral_moves: bool = field(init=False)
    self_capture: bool = field(init=False)
    stalemate_wins: bool = field(init=False)
    fifty_move_resets_on_pawn_move: bool = field(init=False)
    fifty_move_resets_on_lateral_move: bool = field(init=False)

    def __post_init__(self) -> None:
        vid = VariantId(self.id)
        set_ = object.__setattr__
        set_(self, "id", vid)
        set_(self, "castling_ban_plies", 20 if vid is VariantId.NOCASTLING10 else 0)
        set_(self, "castling_allowed", vid is not VariantId.NOCASTLING)
        set_(self, "double_push_ranks", _DOUBLE_PUSH_RANKS.get(vid, frozenset({1})))
        set_(self, "backward_moves", vid is VariantId.PAWNBACK)
        set_(self, "lateral_moves", vid is VariantId.PAWNSIDEWAYS)
        set_(self, "self_capture", vid is VariantId.SELFCAPTURE)
        set_(self, "stalemate_wins", vid is VariantId.STALEMATEWIN)
        set_(self, "fifty_move_resets_on_pawn_move", vid is not VariantId.PAWNBACK)
        set_(self, "fifty_move_resets_on_lateral_move", False)

    @staticmethod
    @cache
    def of(variant: "VariantId | str") -> "VariantConfig":
        try:
            return VariantConfig(VariantId(variant))
        except ValueError as exc:
            raise ValueError(f"Unknown variant '{variant}'") from exc

    @property
    def name(self) -> str:
        return self.id.value

    def castling_open(self, plies_played: int) -> bool:
        return self.castling_allowed and plies_played >= self.castling_ban_plies


ALL_VARIANTS: tuple[VariantConfig, ...] = tuple(VariantConfig.of(v) for v in VariantId)

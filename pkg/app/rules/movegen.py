"""
Legal move generation and move application for every variant.

Moves are generated pseudo-legally, then filtered by playing them on a scratch
board and testing whether the mover's king is attacked.
"""
from functools import lru_cache
from typing import Iterator

from app.core.exceptions import IllegalMoveError
from app.rules.position import Position, canonical_castling
from app.rules.types import (
    PROMOTION_KINDS,
    Color,
    Move,
    MoveFlag,
    Piece,
    PieceKind,
    Square,
    file_of,
    rank_of,
    square,
)

Board = tuple[Piece | None, ...]

_ORTHOGONAL = ((0, 1), (0, -1), (1, 0), (-1, 0))
_DIAGONAL = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_KNIGHT_STEPS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
_KING_STEPS = _ORTHOGONAL + _DIAGONAL


def _targets(steps: tuple[tuple[int, int], ...]) -> tuple[tuple[Square, ...], ...]:
    table = []
    for sq in range(64):
        f, r = file_of(sq), rank_of(sq)
        table.append(
            tuple(
                square(f + df, r + dr)
                for df, dr in steps
                if 0 <= f + df < 8 and 0 <= r + dr < 8
            )
        )
    return tuple(table)


def _rays(
    directions: tuple[tuple[int, int], ...],
) -> tuple[tuple[tuple[Square, ...], ...], ...]:
    table = []
    for sq in range(64):
        f, r = file_of(sq), rank_of(sq)
        per_square = []
        for df, dr in directions:
            ray = []
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                ray.append(square(nf, nr))
                nf += df
                nr += dr
            per_square.append(tuple(ray))
        table.append(tuple(per_square))
    return tuple(table)


KNIGHT_TARGETS = _targets(_KNIGHT_STEPS)
KING_TARGETS = _targets(_KING_STEPS)
ORTHOGONAL_RAYS = _rays(_ORTHOGONAL)
DIAGONAL_RAYS = _rays(_DIAGONAL)

# Squares whose change of occupant clears a castling right.
_RIGHTS_TOUCHED: dict[Square, str] = {
    square(4, 0): "KQ",
    square(7, 0): "K",
    square(0, 0): "Q",
    square(4, 7): "kq",
    square(7, 7): "k",
    square(0, 7): "q",
}


# ---------------------------------------------------------------------------
# Attack detection
# ---------------------------------------------------------------------------


def is_attacked(board: Board, sq: Square, by: Color) -> bool:
    """Whether any piece of colour ``by`` attacks ``sq`` on ``board``."""
    # Pawns of `by` sit one step behind sq from their own point of view.
    origin = sq - by.forward
    if 0 <= origin < 64:
        f = file_of(sq)
        pawn = Piece.of(by, PieceKind.PAWN)
        if f > 0 and board[origin - 1] == pawn:
            return True
        if f < 7 and board[origin + 1] == pawn:
            return True

    knight = Piece.of(by, PieceKind.KNIGHT)
    for t in KNIGHT_TARGETS[sq]:
        if board[t] == knight:
            return True

    king = Piece.of(by, PieceKind.KING)
    for t in KING_TARGETS[sq]:
        if board[t] == king:
            return True

    rook, bishop, queen = (
        Piece.of(by, PieceKind.ROOK),
        Piece.of(by, PieceKind.BISHOP),
        Piece.of(by, PieceKind.QUEEN),
    )
    for ray in ORTHOGONAL_RAYS[sq]:
        for t in ray:
            occupant = board[t]
            if occupant is not None:
                if occupant == rook or occupant == queen:
                    return True
                break
    for ray in DIAGONAL_RAYS[sq]:
        for t in ray:
            occupant = board[t]
            if occupant is not None:
                if occupant == bishop or occupant == queen:
                    return True
                break
    return False


def in_check(p: Position, color: Color | None = None) -> bool:
    color = p.side if color is None else color
    return is_attacked(p.board, p.king_square(color), color.other)


# ---------------------------------------------------------------------------
# Pseudo-legal generation
# ---------------------------------------------------------------------------


def _capture_flag(p: Position, target: Piece | None, mover: Color) -> MoveFlag | None:
    """Flag for landing on an occupied square, or None if that is not allowed."""
    if target is None:
        return MoveFlag.QUIET
    if target.color is not mover:
        return MoveFlag.CAPTURE
    if p.variant.self_capture and target.kind is not PieceKind.KING:
        return MoveFlag.SELF_CAPTURE
    return None


def _pawn_moves(p: Position, sq: Square) -> Iterator[Move]:
    side = p.side
    variant = p.variant
    board = p.board
    fwd = side.forward
    f = file_of(sq)
    rel = side.relative_rank(rank_of(sq))

    def emit(to: Square, flags: MoveFlag) -> Iterator[Move]:
        if side.relative_rank(rank_of(to)) == 7:
            for kind in PROMOTION_KINDS:
                yield Move(sq, to, kind, flags)
        else:
            yield Move(sq, to, None, flags)

    one = sq + fwd
    if board[one] is None:
        yield from emit(one, MoveFlag.QUIET)
        if rel in variant.double_push_ranks and rel + 2 <= 7:
            two = one + fwd
            if board[two] is None:
                yield from emit(two, MoveFlag.DOUBLE_PUSH)

    for df in (-1, 1):
        if not 0 <= f + df < 8:
            continue
        to = one + df
        target = board[to]
        if target is None:
            if p.ep == to:
                yield Move(sq, to, None, MoveFlag.CAPTURE | MoveFlag.EN_PASSANT)
            continue
        flag = _capture_flag(p, target, side)
        if flag is not None:
            yield from emit(to, flag)

    if variant.backward_moves and rel >= 2:
        back = sq - fwd
        if board[back] is None:
            yield Move(sq, back, None, MoveFlag.BACKWARD)

    if variant.lateral_moves:
        for df in (-1, 1):
            if 0 <= f + df < 8 and board[sq + df] is None:
                yield Move(sq, sq + df, None, MoveFlag.LATERAL)


def _step_moves(
    p: Position, sq: Square, targets: tuple[Square, ...]
) -> Iterator[Move]:
    for to in targets:
        flag = _capture_flag(p, p.board[to], p.side)
        if flag is not None:
            yield Move(sq, to, None, flag)


def _slide_moves(
    p: Position, sq: Square, rays: tuple[tuple[Square, ...], ...]
) -> Iterator[Move]:
    for ray in rays:
        for to in ray:
            target = p.board[to]
            flag = _capture_flag(p, target, p.side)
            if flag is not None:
                yield Move(sq, to, None, flag)
            if target is not None:
                break


def _castling_moves(p: Position) -> Iterator[Move]:
    if not p.variant.castling_open(p.plies) or not p.castling:
        return
    side = p.side
    home = 0 if side is Color.WHITE else 7
    king_sq = square(4, home)
    king = Piece.of(side, PieceKind.KING)
    rook = Piece.of(side, PieceKind.ROOK)
    board = p.board
    if board[king_sq] != king:
        return
    enemy = side.other
    short_right, long_right = ("K", "Q") if side is Color.WHITE else ("k", "q")

    if short_right in p.castling and board[square(7, home)] == rook:
        path = (square(5, home), square(6, home))
        if all(board[s] is None for s in path) and not any(
            is_attacked(board, s, enemy) for s in (king_sq, *path)
        ):
            yield Move(king_sq, square(6, home), None, MoveFlag.CASTLE_SHORT)

    if long_right in p.castling and board[square(0, home)] == rook:
        empty = (square(1, home), square(2, home), square(3, home))
        safe = (king_sq, square(3, home), square(2, home))
        if all(board[s] is None for s in empty) and not any(
            is_attacked(board, s, enemy) for s in safe
        ):
            yield Move(king_sq, square(2, home), None, MoveFlag.CASTLE_LONG)


def pseudo_legal_moves(p: Position) -> Iterator[Move]:
    side = p.side
    for sq, piece in enumerate(p.board):
        if piece is None or piece.color is not side:
            continue
        kind = piece.kind
        if kind is PieceKind.PAWN:
            yield from _pawn_moves(p, sq)
        elif kind is PieceKind.KNIGHT:
            yield from _step_moves(p, sq, KNIGHT_TARGETS[sq])
        elif kind is PieceKind.BISHOP:
            yield from _slide_moves(p, sq, DIAGONAL_RAYS[sq])
        elif kind is PieceKind.ROOK:
            yield from _slide_moves(p, sq, ORTHOGONAL_RAYS[sq])
        elif kind is PieceKind.QUEEN:
            yield from _slide_moves(p, sq, ORTHOGONAL_RAYS[sq] + DIAGONAL_RAYS[sq])
        else:
            yield from _step_moves(p, sq, KING_TARGETS[sq])
    yield from _castling_moves(p)


# ---------------------------------------------------------------------------
# Making moves
# ---------------------------------------------------------------------------


def _board_after(board: Board, move: Move, side: Color) -> list[Piece | None]:
    cells = list(board)
    piece = cells[move.from_sq]
    cells[move.from_sq] = None
    if move.promotion is not None:
        piece = Piece.of(side, move.promotion)
    cells[move.to_sq] = piece

    flags = move.flags
    if MoveFlag.EN_PASSANT in flags:
        cells[move.to_sq - side.forward] = None
    elif MoveFlag.CASTLE_SHORT in flags:
        rank = rank_of(move.to_sq)
        cells[square(5, rank)] = cells[square(7, rank)]
        cells[square(7, rank)] = None
    elif MoveFlag.CASTLE_LONG in flags:
        rank = rank_of(move.to_sq)
        cells[square(3, rank)] = cells[square(0, rank)]
        cells[square(0, rank)] = None
    return cells


def _leaves_king_safe(p: Position, move: Move) -> bool:
    cells = _board_after(p.board, move, p.side)
    king = Piece.of(p.side, PieceKind.KING)
    king_sq = move.to_sq if cells[move.to_sq] == king else cells.index(king)
    return not is_attacked(tuple(cells), king_sq, p.side.other)


def make_move(p: Position, move: Move) -> Position:
    """Play ``move`` without checking legality.

    Callers must pass a move produced by :func:`legal_moves` for ``p``.
    """
    side = p.side
    mover = p.board[move.from_sq]
    cells = _board_after(p.board, move, side)
    flags = move.flags

    castling = p.castling
    if castling:
        for sq in (move.from_sq, move.to_sq):
            lost = _RIGHTS_TOUCHED.get(sq)
            if lost:
                castling = "".join(c for c in castling if c not in lost)

    resets = bool(flags & (MoveFlag.CAPTURE | MoveFlag.SELF_CAPTURE))
    if mover is not None and mover.kind is PieceKind.PAWN and not resets:
        if MoveFlag.LATERAL in flags:
            resets = p.variant.fifty_move_resets_on_lateral_move
        elif MoveFlag.BACKWARD not in flags:
            resets = p.variant.fifty_move_resets_on_pawn_move

    return Position(
        board=tuple(cells),
        side=side.other,
        castling=canonical_castling(castling),
        ep=move.from_sq + side.forward if MoveFlag.DOUBLE_PUSH in flags else None,
        halfmove=0 if resets else p.halfmove + 1,
        fullmove=p.fullmove + 1 if side is Color.BLACK else p.fullmove,
        variant=p.variant,
        plies=p.plies + 1,
    )


@lru_cache(maxsize=1 << 15)
def legal_moves(p: Position) -> tuple[Move, ...]:
    """All legal moves of ``p`` in canonical (LAN lexicographic) order."""
    moves = [m for m in pseudo_legal_moves(p) if _leaves_king_safe(p, m)]
    moves.sort(key=lambda m: m.lan)
    return tuple(moves)


def find_move(
    p: Position, from_sq: Square, to_sq: Square, promotion: PieceKind | None = None
) -> Move | None:
    for m in legal_moves(p):
        if m.from_sq == from_sq and m.to_sq == to_sq and m.promotion == promotion:
            return m
    return None


def apply_move(p: Position, move: Move) -> Position:
    """Play a move after validating it against the legal move list.

    Raises:
        IllegalMoveError: If no legal move of ``p`` matches the squares and
            promotion of ``move``.
    """
    legal = find_move(p, move.from_sq, move.to_sq, move.promotion)
    if legal is None:
        from app.notation.fen import serialize_fen

        raise IllegalMoveError(move.lan, serialize_fen(p))
    return make_move(p, legal)

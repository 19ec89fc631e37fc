"""
Extended FEN: the six standard fields followed by ``variant=<id>`` and, for the
delayed-castling variant, ``plies=<n>``.

Example::

    4k3/4P3/5K2/8/8/8/8/8 w - - 0 1 variant=stalematewin
"""
from app.core.exceptions import FenSyntaxError, IllegalPositionError, VariantMismatchError
from app.rules.movegen import is_attacked
from app.rules.position import CASTLING_ORDER, Position, canonical_castling
from app.rules.types import (
    PROMOTION_KINDS,
    Color,
    Piece,
    PieceKind,
    VariantConfig,
    VariantId,
    parse_square,
    rank_of,
    square,
    square_name,
)

STANDARD_START = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

# Castling right -> (king square, rook square, colour) it depends on.
_RIGHT_HOMES = {
    "K": (square(4, 0), square(7, 0), Color.WHITE),
    "Q": (square(4, 0), square(0, 0), Color.WHITE),
    "k": (square(4, 7), square(7, 7), Color.BLACK),
    "q": (square(4, 7), square(0, 7), Color.BLACK),
}


def serialize_placement(board: tuple[Piece | None, ...]) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row, empty = "", 0
        for file in range(8):
            piece = board[square(file, rank)]
            if piece is None:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            row += piece.symbol
        if empty:
            row += str(empty)
        rows.append(row)
    return "/".join(rows)


def serialize_fen(p: Position) -> str:
    fields = [
        serialize_placement(p.board),
        "w" if p.side is Color.WHITE else "b",
        p.castling or "-",
        square_name(p.ep) if p.ep is not None else "-",
        str(p.halfmove),
        str(p.fullmove),
        f"variant={p.variant.name}",
    ]
    if p.variant.castling_ban_plies:
        fields.append(f"plies={p.plies}")
    return " ".join(fields)


def parse_placement(text: str) -> tuple[Piece | None, ...]:
    rows = text.split("/")
    if len(rows) != 8:
        raise FenSyntaxError(f"Board field must have 8 ranks, got {len(rows)}")
    board: list[Piece | None] = [None] * 64
    for index, row in enumerate(rows):
        rank = 7 - index
        file = 0
        for char in row:
            if char in "12345678":
                file += int(char)
            else:
                try:
                    piece = Piece.from_symbol(char)
                except ValueError as exc:
                    raise FenSyntaxError(f"Unknown piece letter '{char}'") from exc
                if file > 7:
                    raise FenSyntaxError(f"Rank {rank + 1} has more than 8 files: '{row}'")
                board[square(file, rank)] = piece
                file += 1
        if file != 8:
            raise FenSyntaxError(f"Rank {rank + 1} does not describe 8 files: '{row}'")
    return tuple(board)


def _parse_counter(text: str, name: str, minimum: int) -> int:
    if not (text.isascii() and text.isdigit()):
        raise FenSyntaxError(f"{name} must be a non-negative integer, got '{text}'")
    value = int(text)
    if value < minimum:
        raise FenSyntaxError(f"{name} must be >= {minimum}, got {value}")
    return value


def _parse_extensions(tokens: list[str]) -> dict[str, str]:
    extensions: dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or key not in ("variant", "plies") or key in extensions:
            raise FenSyntaxError(f"Unexpected FEN field '{token}'")
        extensions[key] = value
    return extensions


def _check_legal(board: tuple[Piece | None, ...], side: Color) -> None:
    for color in Color:
        kings = board.count(Piece.of(color, PieceKind.KING))
        if kings != 1:
            raise IllegalPositionError(f"{color.name.lower()} has {kings} kings, expected 1")
    for sq in list(range(8)) + list(range(56, 64)):
        piece = board[sq]
        if piece is not None and piece.kind is PieceKind.PAWN:
            raise IllegalPositionError(f"Pawn on back rank at {square_name(sq)}")
    other = side.other
    if is_attacked(board, board.index(Piece.of(other, PieceKind.KING)), side):
        raise IllegalPositionError("Side not to move is in check")


def _check_ep(
    board: tuple[Piece | None, ...], side: Color, ep: int, variant: VariantConfig
) -> None:
    pusher = side.other
    if not 1 <= rank_of(ep) <= 6:
        raise VariantMismatchError(f"En passant square {square_name(ep)} is on an edge rank")
    landing = ep + pusher.forward
    origin = ep - pusher.forward
    origin_rank = pusher.relative_rank(rank_of(origin))
    if origin_rank not in variant.double_push_ranks:
        raise VariantMismatchError(
            f"En passant square {square_name(ep)} is not reachable by a double push "
            f"in variant '{variant.name}'"
        )
    occupant = board[landing]
    # A push onto the last rank leaves the promoted piece on the landing square.
    if pusher.relative_rank(rank_of(landing)) == 7:
        pushed = {Piece.of(pusher, kind) for kind in PROMOTION_KINDS}
    else:
        pushed = {Piece.of(pusher, PieceKind.PAWN)}
    if board[ep] is not None or board[origin] is not None or occupant not in pushed:
        raise IllegalPositionError(
            f"En passant square {square_name(ep)} is inconsistent with the board"
        )


def parse_fen(text: str, variant: VariantConfig | VariantId | str | None = None) -> Position:
    """Parse an extended (or standard) FEN.

    Args:
        text: FEN text. A standard six-field FEN is read as Classical unless
            ``variant`` says otherwise.
        variant: Optional variant the caller expects. Conflicts with an
            explicit ``variant=`` field raise VariantMismatchError.

    Returns:
        A legal Position. Castling rights that the board cannot support are
        dropped.
    """
    if not isinstance(text, str):
        raise FenSyntaxError("FEN must be text")
    tokens = text.split()
    if len(tokens) < 6:
        raise FenSyntaxError(f"FEN needs at least 6 fields, got {len(tokens)}")
    placement, side_text, castling_text, ep_text, half_text, full_text = tokens[:6]
    extensions = _parse_extensions(tokens[6:])

    expected = variant
    if expected is not None and not isinstance(expected, VariantConfig):
        try:
            expected = VariantConfig.of(expected)
        except ValueError as exc:
            raise VariantMismatchError(str(exc)) from exc
    if "variant" in extensions:
        try:
            config = VariantConfig.of(extensions["variant"])
        except ValueError as exc:
            raise VariantMismatchError(str(exc)) from exc
        if expected is not None and expected != config:
            raise VariantMismatchError(
                f"FEN declares variant '{config.name}' but '{expected.name}' was requested"
            )
    else:
        config = expected or VariantConfig.of(VariantId.CLASSICAL)

    board = parse_placement(placement)
    if side_text not in ("w", "b"):
        raise FenSyntaxError(f"Side to move must be 'w' or 'b', got '{side_text}'")
    side = Color.WHITE if side_text == "w" else Color.BLACK

    letters = set(castling_text)
    if castling_text != "-" and (
        not letters <= set(CASTLING_ORDER) or len(letters) != len(castling_text)
    ):
        raise FenSyntaxError(f"Bad castling field '{castling_text}'")
    castling = "" if castling_text == "-" else castling_text

    ep = None
    if ep_text != "-":
        try:
            ep = parse_square(ep_text)
        except ValueError as exc:
            raise FenSyntaxError(str(exc)) from exc

    halfmove = _parse_counter(half_text, "Halfmove clock", 0)
    fullmove = _parse_counter(full_text, "Fullmove number", 1)

    if "plies" in extensions:
        if not config.castling_ban_plies:
            raise VariantMismatchError(f"'plies=' is not used by variant '{config.name}'")
        plies = _parse_counter(extensions["plies"], "Plies", 0)
    else:
        plies = 2 * (fullmove - 1) + (1 if side is Color.BLACK else 0)

    _check_legal(board, side)
    if halfmove > 101:
        raise IllegalPositionError(f"Halfmove clock {halfmove} exceeds the draw threshold")
    if ep is not None:
        _check_ep(board, side, ep, config)

    castling = "".join(
        right
        for right in castling
        if board[_RIGHT_HOMES[right][0]] == Piece.of(_RIGHT_HOMES[right][2], PieceKind.KING)
        and board[_RIGHT_HOMES[right][1]] == Piece.of(_RIGHT_HOMES[right][2], PieceKind.ROOK)
    )

    return Position(
        board=board,
        side=side,
        castling=canonical_castling(castling),
        ep=ep,
        halfmove=halfmove,
        fullmove=fullmove,
        variant=config,
        plies=plies,
    )

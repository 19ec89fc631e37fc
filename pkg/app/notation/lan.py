"""
Long algebraic notation (``e2e4``, ``b7b8q``, castling as ``e1g1``).

Self-captures are written like captures; the position tells them apart.
A SAN reader is included for transcribed games only; records always use LAN.
"""
import re

from app.core.exceptions import FenSyntaxError, IllegalMoveError
from app.rules.movegen import find_move, legal_moves
from app.rules.position import Position
from app.rules.types import Move, MoveFlag, PieceKind, parse_square

_LAN_RE = re.compile(r"^([a-h][1-8])([a-h][1-8])([qrbn])?$")
_SAN_RE = re.compile(
    r"^(?P<piece>[NBRQK])?(?P<file>[a-h])?(?P<rank>[1-8])?x?"
    r"(?P<to>[a-h][1-8])(?:=?(?P<promotion>[NBRQ]))?$"
)
_ANNOTATIONS = "+#!?"


def serialize_lan(move: Move) -> str:
    return move.lan


def _fen(p: Position) -> str:
    from app.notation.fen import serialize_fen

    return serialize_fen(p)


def parse_lan(p: Position, text: str) -> Move:
    """Resolve LAN text to the legal move of ``p`` it names, flags included.

    Raises:
        FenSyntaxError: If the text is not LAN.
        IllegalMoveError: If the squares name no legal move.
    """
    match = _LAN_RE.match(text.strip().lower()) if isinstance(text, str) else None
    if match is None:
        raise FenSyntaxError(f"Not a LAN move: '{text}'")
    from_text, to_text, promo_text = match.groups()
    promotion = PieceKind.from_symbol(promo_text) if promo_text else None
    move = find_move(p, parse_square(from_text), parse_square(to_text), promotion)
    if move is None:
        raise IllegalMoveError(text, _fen(p))
    return move


def resolve_san(p: Position, text: str) -> Move:
    """Resolve a SAN token against the legal moves of ``p``.

    Capture markers are not checked, so the same token covers captures and
    self-captures.
    """
    token = text.strip().rstrip(_ANNOTATIONS).replace("0", "O")
    if token in ("O-O", "O-O-O"):
        flag = MoveFlag.CASTLE_SHORT if token == "O-O" else MoveFlag.CASTLE_LONG
        for move in legal_moves(p):
            if flag in move.flags:
                return move
        raise IllegalMoveError(text, _fen(p))

    match = _SAN_RE.match(token)
    if match is None:
        raise FenSyntaxError(f"Not a SAN move: '{text}'")
    kind = PieceKind.from_symbol(match["piece"]) if match["piece"] else PieceKind.PAWN
    to_sq = parse_square(match["to"])
    promotion = PieceKind.from_symbol(match["promotion"]) if match["promotion"] else None

    candidates = []
    for move in legal_moves(p):
        piece = p.board[move.from_sq]
        if piece is None or piece.kind is not kind or move.to_sq != to_sq:
            continue
        if move.promotion != promotion:
            continue
        if match["file"] and "abcdefgh"[move.from_sq & 7] != match["file"]:
            continue
        if match["rank"] and "12345678"[move.from_sq >> 3] != match["rank"]:
            continue
        candidates.append(move)

    if len(candidates) != 1:
        raise IllegalMoveError(text, _fen(p))
    return candidates[0]

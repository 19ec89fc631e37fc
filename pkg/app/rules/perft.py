"""
Leaf counting of the legal-move tree, used to verify the move generator.
"""
from app.rules.movegen import legal_moves, make_move
from app.rules.position import Position


def perft(p: Position, depth: int) -> int:
    """Number of leaf nodes exactly ``depth`` plies below ``p``.

    Terminal rules (fifty-move, repetition) are not applied, only the
    absence of legal moves stops a branch.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = legal_moves(p)
    if depth == 1:
        return len(moves)
    return sum(perft(make_move(p, m), depth - 1) for m in moves)


def divide(p: Position, depth: int) -> dict[str, int]:
    """Per-root-move leaf counts, keyed by long algebraic notation."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return {m.lan: perft(make_move(p, m), depth - 1) for m in legal_moves(p)}

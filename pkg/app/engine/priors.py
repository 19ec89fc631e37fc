"""
Prior/value providers.

A provider maps a position to a probability vector over its legal moves (in
canonical order) plus a value estimate for the side to move. They stand in for
a trained policy/value network.
"""
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import softmax

from app.rules.movegen import in_check, legal_moves
from app.rules.position import Position, material_difference
from app.rules.types import Move, MoveFlag, PieceKind

DEFAULT_PIECE_WEIGHTS = (1.0, 3.0, 3.0, 5.0, 9.0)


@dataclass(frozen=True)
class Evaluation:
    moves: tuple[Move, ...]
    probs: np.ndarray
    value: float


@runtime_checkable
class PriorProvider(Protocol):
    name: str

    def evaluate(self, p: Position) -> Evaluation: ...


def _terminal_evaluation(p: Position) -> Evaluation:
    # No legal moves: a loss when mated or when stalemate is a win for the
    # side that delivered it, otherwise a draw.
    lost = in_check(p) or p.variant.stalemate_wins
    return Evaluation(moves=(), probs=np.zeros(0), value=-1.0 if lost else 0.0)


@dataclass(frozen=True)
class UniformPrior:
    """Equal probability on every legal move, value 0."""

    name: str = "uniform"

    def evaluate(self, p: Position) -> Evaluation:
        moves = legal_moves(p)
        if not moves:
            return _terminal_evaluation(p)
        return Evaluation(moves=moves, probs=np.full(len(moves), 1.0 / len(moves)), value=0.0)


@dataclass(frozen=True)
class MaterialPrior:
    """Softmax over the one-ply material gain of each move.

    A capture gains the captured piece, a self-capture loses it, a promotion
    gains the difference between the new piece and the pawn. The value is
    ``tanh(value_scale * material balance)`` from the side to move.
    """

    weights: tuple[float, ...] = DEFAULT_PIECE_WEIGHTS
    temperature: float = 1.0
    value_scale: float = 0.2
    name: str = "material"

    def __post_init__(self) -> None:
        if len(self.weights) != 5 or not np.all(np.isfinite(self.weights)):
            raise ValueError(
                "weights must be 5 finite numbers (pawn, knight, bishop, rook, queen)"
            )
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")

    def piece_value(self, kind: PieceKind) -> float:
        return 0.0 if kind is PieceKind.KING else self.weights[kind - 1]

    def gain(self, p: Position, move: Move) -> float:
        gain = 0.0
        if MoveFlag.EN_PASSANT in move.flags:
            gain += self.piece_value(PieceKind.PAWN)
        else:
            target = p.board[move.to_sq]
            if target is not None:
                sign = -1.0 if MoveFlag.SELF_CAPTURE in move.flags else 1.0
                gain += sign * self.piece_value(target.kind)
        if move.promotion is not None:
            gain += self.piece_value(move.promotion) - self.piece_value(PieceKind.PAWN)
        return gain

    def balance(self, p: Position) -> float:
        return float(np.dot(material_difference(p), self.weights))

    def evaluate(self, p: Position) -> Evaluation:
        moves = legal_moves(p)
        if not moves:
            return _terminal_evaluation(p)
        gains = np.array([self.gain(p, m) for m in moves])
        probs = softmax(gains / self.temperature)
        value = float(np.tanh(self.value_scale * self.balance(p)))
        return Evaluation(moves=moves, probs=probs, value=value)


def uniform_prior() -> UniformPrior:
    return UniformPrior()


def material_prior(
    weights: tuple[float, ...] = DEFAULT_PIECE_WEIGHTS,
    value_scale: float = 0.2,
    temperature: float = 1.0,
) -> MaterialPrior:
    return MaterialPrior(
        weights=tuple(float(w) for w in weights),
        temperature=temperature,
        value_scale=value_scale,
    )


PRIORS = {"uniform": uniform_prior, "material": material_prior}


def prior_from_name(name: str) -> PriorProvider:
    try:
        return PRIORS[name]()
    except KeyError as exc:
        raise ValueError(f"Unknown prior '{name}'; choose from {sorted(PRIORS)}") from exc

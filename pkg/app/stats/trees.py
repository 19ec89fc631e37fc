"""
Move trees that the sequence estimators walk.

A tree exposes a root state, the labelled move distribution at a state and
the child reached by a label. ``ChessTree`` walks real games under a prior;
``BranchingTree`` is a synthetic tree with a fixed move distribution at every
node, used to check estimators against closed forms.
"""
from collections.abc import Hashable
from dataclasses import dataclass
from typing import Any, Optional, Protocol

import numpy as np

from app.engine.priors import PriorProvider
from app.notation.fen import parse_fen, serialize_fen
from app.notation.lan import parse_lan
from app.rules.movegen import make_move
from app.rules.position import Position, initial_position, repetition_key
from app.rules.status import classify
from app.rules.types import VariantConfig, VariantId

Labels = tuple[str, ...]


class MoveTree(Protocol):
    def root(self) -> Any: ...

    def expand(self, state: Any) -> tuple[Labels, np.ndarray]:
        """Move labels (sorted) and their probabilities; empty when terminal."""
        ...

    def child(self, state: Any, label: str) -> Any: ...

    def describe(self, state: Any) -> str: ...


@dataclass(frozen=True)
class ChessState:
    position: Position
    history: tuple[Hashable, ...] = ()

    def occurrences(self) -> int:
        key = repetition_key(self.position)
        return sum(1 for k in self.history if k == key) + 1


class ChessTree:
    """Game tree of one variant under a prior.

    Any ``ChessState`` can be expanded, including states reached under another
    variant's rules: the board is reinterpreted with this tree's variant.
    """

    def __init__(
        self,
        prior: PriorProvider,
        variant: VariantConfig | VariantId | str,
        start_fen: Optional[str] = None,
    ) -> None:
        self.prior = prior
        if not isinstance(variant, VariantConfig):
            variant = VariantConfig.of(variant)
        self.variant = variant
        self.start_fen = start_fen

    def _view(self, state: ChessState) -> Position:
        position = state.position
        if position.variant != self.variant:
            position = position.with_variant(self.variant)
        return position

    def root(self) -> ChessState:
        if self.start_fen is None:
            return ChessState(initial_position(self.variant))
        return ChessState(parse_fen(self.start_fen, self.variant))

    def expand(self, state: ChessState) -> tuple[Labels, np.ndarray]:
        position = self._view(state)
        if classify(position, state.occurrences()).is_terminal:
            return (), np.zeros(0)
        evaluation = self.prior.evaluate(position)
        labels = tuple(m.lan for m in evaluation.moves)
        return labels, np.asarray(evaluation.probs, dtype=float)

    def child(self, state: ChessState, label: str) -> ChessState:
        position = self._view(state)
        move = parse_lan(position, label)
        return ChessState(
            make_move(position, move),
            state.history + (repetition_key(state.position),),
        )

    def describe(self, state: ChessState) -> str:
        return serialize_fen(self._view(state))


class BranchingTree:
    """Synthetic tree: every node up to ``depth`` has the same move distribution.

    Labels are ``m0``, ``m1``... so sorting keeps them aligned with ``probs``
    for up to ten moves; wider trees zero-pad the index.
    """

    def __init__(self, branching: int, depth: int, probs: Optional[np.ndarray] = None) -> None:
        if branching < 1 or depth < 0:
            raise ValueError("branching must be >= 1 and depth >= 0")
        width = len(str(branching - 1))
        self.labels: Labels = tuple(f"m{i:0{width}d}" for i in range(branching))
        if probs is None:
            probs = np.full(branching, 1.0 / branching)
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (branching,) or not np.isclose(probs.sum(), 1.0):
            raise ValueError("probs must be a distribution over the branching moves")
        self.probs = probs
        self.depth = depth

    def root(self) -> tuple[str, ...]:
        return ()

    def expand(self, state: tuple[str, ...]) -> tuple[Labels, np.ndarray]:
        if len(state) >= self.depth:
            return (), np.zeros(0)
        return self.labels, self.probs

    def child(self, state: tuple[str, ...], label: str) -> tuple[str, ...]:
        return state + (label,)

    def describe(self, state: tuple[str, ...]) -> str:
        return "/".join(state) or "<root>"


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; never returns a zero-probability index."""
    cumulative = np.cumsum(probs)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return min(index, len(probs) - 1)

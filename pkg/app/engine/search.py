"""
PUCT Monte Carlo tree search over a prior/value provider.

Each simulation descends from the root by maximising
``Q + c_puct * P * sqrt(sum N) / (1 + N)`` (unvisited edges have Q = 0, ties
go to the lowest move index, i.e. the lexicographically first LAN), expands one
leaf with the provider and backs the value up with alternating sign.
"""
from collections import Counter
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from app.config import settings
from app.core.exceptions import NoLegalMovesError
from app.core.logging import get_logger
from app.engine.priors import PriorProvider
from app.rules.movegen import make_move
from app.rules.position import Position, repetition_key
from app.rules.status import GameState, classify
from app.rules.types import Move

logger = get_logger(__name__)


class SearchConfig(BaseModel):
    """Search and self-play parameters. Defaults come from the settings."""

    simulations: int = Field(default_factory=lambda: settings.simulations, ge=1)
    c_puct: float = Field(default_factory=lambda: settings.c_puct, gt=0)
    root_noise_alpha: float = Field(default_factory=lambda: settings.root_noise_alpha, gt=0)
    root_noise_weight: float = Field(
        default_factory=lambda: settings.root_noise_weight, ge=0, le=1
    )
    softmax_plies: int = Field(default_factory=lambda: settings.softmax_plies, ge=0)
    softmax_temperature: float = Field(1.0, gt=0)
    max_game_plies: int = Field(default_factory=lambda: settings.max_game_plies, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed, ge=0, lt=2**64)


@dataclass
class Node:
    position: Position
    key: Hashable
    parent: Optional["Node"] = None
    moves: tuple[Move, ...] = ()
    priors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    visits: np.ndarray = field(default_factory=lambda: np.zeros(0))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    children: list[Optional["Node"]] = field(default_factory=list)
    terminal_value: Optional[float] = None

    def expand(self, moves: tuple[Move, ...], priors: np.ndarray) -> None:
        self.moves = moves
        self.priors = np.asarray(priors, dtype=float)
        self.visits = np.zeros(len(moves))
        self.values = np.zeros(len(moves))
        self.children = [None] * len(moves)

    def select(self, c_puct: float) -> int:
        total = self.visits.sum()
        q = np.divide(
            self.values,
            self.visits,
            out=np.zeros_like(self.values),
            where=self.visits > 0,
        )
        u = c_puct * self.priors * np.sqrt(total) / (1.0 + self.visits)
        return int(np.argmax(q + u))


@dataclass(frozen=True)
class SearchResult:
    moves: tuple[Move, ...]
    visits: np.ndarray
    root_value: float
    priors: np.ndarray

    def visit_map(self) -> dict[str, int]:
        return {m.lan: int(n) for m, n in zip(self.moves, self.visits)}


def _terminal_value(p: Position, occurrences: int) -> Optional[float]:
    """Value for the side to move if ``p`` ends the game, else None."""
    status = classify(p, occurrences)
    if status.state is GameState.ONGOING:
        return None
    if status.state is GameState.DRAW:
        return 0.0
    # Any decisive ending is a loss for the side to move.
    return -1.0


def _occurrences(node: Node, history: Mapping[Hashable, int]) -> int:
    count = history.get(node.key, 0)
    walker: Optional[Node] = node
    while walker is not None:
        if walker.key == node.key:
            count += 1
        walker = walker.parent
    return count


def backup(path: Sequence[tuple[Node, int]], value: float) -> None:
    """Credit a leaf value along ``path``, from the root down to the leaf.

    ``value`` is from the side to move at the leaf; each edge is credited from
    the point of view of the side that chose it, so the sign flips every ply.
    """
    for parent, index in reversed(path):
        value = -value
        parent.visits[index] += 1
        parent.values[index] += value


def search(
    p: Position,
    prior: PriorProvider,
    cfg: SearchConfig,
    rng: np.random.Generator,
    at_root: bool = True,
    history: Optional[Mapping[Hashable, int]] = None,
) -> SearchResult:
    """Run ``cfg.simulations`` PUCT simulations from ``p``.

    Args:
        p: Position to search; must not be terminal.
        prior: Provider used to expand leaves.
        cfg: Search parameters.
        rng: Generator used for root noise.
        at_root: Mix Dirichlet noise into the root priors when the noise
            weight is positive.
        history: Occurrence counts of repetition keys of the game positions
            before ``p``.

    Returns:
        Visit counts per legal move (summing to ``cfg.simulations``) and the
        mean root value from the side to move.

    Raises:
        NoLegalMovesError: If ``p`` is terminal.
    """
    history = history if history is not None else Counter()
    root = Node(position=p, key=repetition_key(p))
    if _terminal_value(p, _occurrences(root, history)) is not None:
        from app.notation.fen import serialize_fen

        raise NoLegalMovesError(serialize_fen(p))

    evaluation = prior.evaluate(p)
    priors = evaluation.probs
    if at_root and cfg.root_noise_weight > 0:
        noise = rng.dirichlet(np.full(len(priors), cfg.root_noise_alpha))
        priors = (1.0 - cfg.root_noise_weight) * priors + cfg.root_noise_weight * noise
        priors = priors / priors.sum()
    root.expand(evaluation.moves, priors)

    for _ in range(cfg.simulations):
        node = root
        path: list[tuple[Node, int]] = []
        while True:
            index = node.select(cfg.c_puct)
            path.append((node, index))
            child = node.children[index]
            if child is None:
                position = make_move(node.position, node.moves[index])
                child = Node(position=position, key=repetition_key(position), parent=node)
                node.children[index] = child
                child.terminal_value = _terminal_value(position, _occurrences(child, history))
                if child.terminal_value is not None:
                    value = child.terminal_value
                else:
                    leaf = prior.evaluate(position)
                    child.expand(leaf.moves, leaf.probs)
                    value = leaf.value
                break
            if child.terminal_value is not None:
                value = child.terminal_value
                break
            node = child

        backup(path, value)

    visits = root.visits.astype(np.int64)
    root_value = float(root.values.sum() / root.visits.sum())
    return SearchResult(moves=root.moves, visits=visits, root_value=root_value, priors=priors)

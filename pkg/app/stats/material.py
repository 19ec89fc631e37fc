"""
Piece values fitted from game outcomes.

Each training position gives the material difference vector
``d = [1, dP, dN, dB, dR, dQ]`` from the side to move and the game outcome
``z`` in {-1, 0, 1} from that side. The fit minimises the mean squared error
between ``z`` and ``tanh(w . d)`` and reports ``w_k / w_pawn``.
"""
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from tqdm import tqdm

from app.core.exceptions import DegenerateDataError, NonPositivePawnError
from app.core.logging import get_logger
from app.notation.records import replay_game
from app.rules.position import material_difference
from app.rules.status import GameState
from app.rules.types import Color
from app.schemas.game import GameRecord

logger = get_logger(__name__)

PARAMETERS = ("bias", "pawn", "knight", "bishop", "rook", "queen")
FitMode = Literal["all", "one-per-game"]


@dataclass(frozen=True)
class PositionFilter:
    start_ply: int = 20
    mode: FitMode = "all"
    seed: int = 0


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 10_000
    tolerance: float = 1e-8
    initial_step: float = 1.0
    armijo: float = 1e-4


@dataclass
class PieceValueModel:
    weights: np.ndarray
    final_loss: float
    iterations: int
    gradient_norm: float
    positions: int
    mode: str
    start_ply: int
    normalized: dict[str, float] = field(default_factory=dict)


def _outcome_for(state: GameState, side: Color) -> float:
    if state is GameState.DRAW:
        return 0.0
    winner = Color.WHITE if state is GameState.WHITE_WINS else Color.BLACK
    return 1.0 if winner is side else -1.0


def training_data(
    games: Iterable[GameRecord],
    position_filter: PositionFilter = PositionFilter(),
    progress: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix (n x 6) and outcome vector from finished games."""
    rng = np.random.default_rng(position_filter.seed)
    rows: list[tuple[int, ...]] = []
    labels: list[float] = []
    for game in tqdm(games, desc="positions", unit="game", disable=not progress):
        if not game.finished:
            continue
        replay = replay_game(game)
        eligible = replay.positions[position_filter.start_ply :]
        if not eligible:
            continue
        if position_filter.mode == "one-per-game":
            eligible = [eligible[int(rng.integers(len(eligible)))]]
        for position in eligible:
            rows.append((1, *material_difference(position)))
            labels.append(_outcome_for(game.result.state, position.side))
    if not rows:
        return np.zeros((0, 6)), np.zeros(0)
    return np.asarray(rows, dtype=float), np.asarray(labels, dtype=float)


def loss_and_gradient(w: np.ndarray, X: np.ndarray, z: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error of ``tanh(X w)`` against ``z`` and its gradient."""
    t = np.tanh(X @ w)
    residual = z - t
    loss = float(np.mean(residual**2))
    grad = -2.0 * (X.T @ (residual * (1.0 - t**2))) / len(z)
    return loss, grad


def minimise(
    X: np.ndarray, z: np.ndarray, optimizer: OptimizerConfig = OptimizerConfig()
) -> tuple[np.ndarray, float, int, float]:
    """Full-batch gradient descent with Armijo backtracking.

    Returns:
        Weights, final loss, iterations used and final gradient norm.
    """
    w = np.zeros(X.shape[1])
    loss, grad = loss_and_gradient(w, X, z)
    step = optimizer.initial_step
    iteration = 0
    for iteration in range(1, optimizer.max_iterations + 1):
        norm_sq = float(grad @ grad)
        if np.sqrt(norm_sq) < optimizer.tolerance:
            iteration -= 1
            break
        step *= 2.0
        while True:
            candidate = w - step * grad
            new_loss, new_grad = loss_and_gradient(candidate, X, z)
            if new_loss <= loss - optimizer.armijo * step * norm_sq or step < 1e-16:
                break
            step *= 0.5
        if step < 1e-16:
            break
        w, loss, grad = candidate, new_loss, new_grad
    return w, loss, iteration, float(np.linalg.norm(grad))


def fit_piece_values(
    games: Iterable[GameRecord],
    position_filter: PositionFilter = PositionFilter(),
    optimizer: OptimizerConfig = OptimizerConfig(),
    progress: bool = False,
) -> PieceValueModel:
    """Fit piece values from the outcomes of ``games``.

    Raises:
        DegenerateDataError: If no position has a non-zero material difference.
        NonPositivePawnError: If the fitted pawn weight is not positive.
    """
    X, z = training_data(games, position_filter, progress)
    return fit_from_features(X, z, position_filter, optimizer)


def fit_from_features(
    X: np.ndarray,
    z: np.ndarray,
    position_filter: PositionFilter = PositionFilter(),
    optimizer: OptimizerConfig = OptimizerConfig(),
) -> PieceValueModel:
    if len(z) == 0 or not np.any(X[:, 1:]):
        raise DegenerateDataError(
            f"No training position with a material difference ({len(z)} positions)"
        )
    logger.info("Fitting piece values on %d position(s)", len(z))
    w, loss, iterations, grad_norm = minimise(X, z, optimizer)
    if w[1] <= 0:
        raise NonPositivePawnError([float(x) for x in w])
    model = PieceValueModel(
        weights=w,
        final_loss=loss,
        iterations=iterations,
        gradient_norm=grad_norm,
        positions=len(z),
        mode=position_filter.mode,
        start_ply=position_filter.start_ply,
    )
    model.normalized = {
        name: float(w[i] / w[1]) for i, name in enumerate(PARAMETERS) if i >= 1
    }
    logger.debug("Fit finished after %d iteration(s), loss %.6f", iterations, loss)
    return model

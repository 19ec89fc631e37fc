"""
Outcome inference for game sets.

With a uniform prior, the posterior of (pi_win, pi_draw, pi_lose) after
observing counts (w, d, l) is Dirichlet(w + 1, d + 1, l + 1). Comparisons
between two sets are Monte Carlo estimates over paired posterior draws.
"""
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta

from app.core.exceptions import DegenerateDataError, UnfinishedGameError
from app.rules.status import GameState
from app.schemas.game import GameRecord


@dataclass(frozen=True)
class OutcomeCounts:
    """Results from White's point of view."""

    n_win: int = 0
    n_draw: int = 0
    n_lose: int = 0

    def __post_init__(self) -> None:
        if min(self.n_win, self.n_draw, self.n_lose) < 0:
            raise ValueError("Outcome counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n_win + self.n_draw + self.n_lose

    @property
    def dirichlet_params(self) -> np.ndarray:
        return np.array([self.n_win + 1, self.n_draw + 1, self.n_lose + 1], dtype=float)

    def __add__(self, other: "OutcomeCounts") -> "OutcomeCounts":
        return OutcomeCounts(
            self.n_win + other.n_win,
            self.n_draw + other.n_draw,
            self.n_lose + other.n_lose,
        )


def count_outcomes(games: Iterable[GameRecord]) -> OutcomeCounts:
    """Tally results. Capped games are draws.

    Raises:
        UnfinishedGameError: If a game has no result.
    """
    wins = draws = losses = 0
    for index, game in enumerate(games):
        state = game.result.state
        if state is GameState.WHITE_WINS:
            wins += 1
        elif state is GameState.BLACK_WINS:
            losses += 1
        elif state is GameState.DRAW:
            draws += 1
        else:
            raise UnfinishedGameError(f"Game {index} (seed {game.seed}) has no result")
    return OutcomeCounts(wins, draws, losses)


def sample_posterior(
    counts: OutcomeCounts, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``samples`` rows of (pi_win, pi_draw, pi_lose)."""
    return rng.dirichlet(counts.dirichlet_params, size=samples)


def _paired_draws(
    a: OutcomeCounts, b: OutcomeCounts, samples: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    return sample_posterior(a, samples, rng), sample_posterior(b, samples, rng)


def expected_scores(pi: np.ndarray) -> np.ndarray:
    return pi[..., 0] + 0.5 * pi[..., 1]


def draw_rate_comparison(
    a: OutcomeCounts, b: OutcomeCounts, samples: int, seed: int
) -> float:
    """P(pi_draw of A < pi_draw of B) under the two posteriors."""
    pa, pb = _paired_draws(a, b, samples, seed)
    return float(np.mean(pa[:, 1] < pb[:, 1]))


def expected_score_comparison(
    a: OutcomeCounts, b: OutcomeCounts, samples: int, seed: int
) -> float:
    """P(White's expected score under A > under B)."""
    pa, pb = _paired_draws(a, b, samples, seed)
    return float(np.mean(expected_scores(pa) > expected_scores(pb)))


def empirical_expected_score(counts: OutcomeCounts) -> float:
    if counts.n < 1:
        raise DegenerateDataError("Expected score needs at least one game")
    return (counts.n_win + 0.5 * counts.n_draw) / counts.n


@dataclass(frozen=True)
class Interval:
    mean: float
    low: float
    high: float


@dataclass(frozen=True)
class PosteriorSummary:
    win: Interval
    draw: Interval
    lose: Interval
    score: Interval


def posterior_summary(
    counts: OutcomeCounts, samples: int, seed: int, level: float = 0.95
) -> PosteriorSummary:
    """Posterior means and equal-tailed credible intervals.

    The outcome probabilities use the exact Beta marginals of the Dirichlet;
    the expected score uses Monte Carlo quantiles.
    """
    params = counts.dirichlet_params
    total = params.sum()
    tail = (1.0 - level) / 2.0
    marginals = []
    for alpha in params:
        dist = beta(alpha, total - alpha)
        marginals.append(
            Interval(
                mean=float(alpha / total),
                low=float(dist.ppf(tail)),
                high=float(dist.ppf(1.0 - tail)),
            )
        )
    scores = expected_scores(sample_posterior(counts, samples, np.random.default_rng(seed)))
    low, high = np.quantile(scores, [tail, 1.0 - tail])
    score = Interval(
        mean=float((params[0] + 0.5 * params[1]) / total), low=float(low), high=float(high)
    )
    return PosteriorSummary(*marginals, score=score)

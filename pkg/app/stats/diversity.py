"""
Opening-tree diversity.

For sequences sampled ancestrally from a prior:

* ``H(t)``: expected surprisal ``-log p(s_1..s_t)`` of the first t moves (nats);
* ``M(t)``: expected number of candidate moves ``m = exp(H(state))`` at the
  state from which the t-th move is chosen.

Sequences that reach a terminal state stop there and only count towards the
plies they played; per-ply sample sizes are reported.
"""
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import entr
from tqdm import tqdm

from app.core.exceptions import NoLegalMovesError
from app.core.logging import get_logger
from app.engine.priors import PriorProvider
from app.rules.position import Position
from app.stats.trees import MoveTree, sample_index

logger = get_logger(__name__)


def entropy(probs: np.ndarray) -> float:
    """Shannon entropy in nats, with 0 log 0 = 0."""
    return float(entr(np.asarray(probs, dtype=float)).sum())


def position_entropy(prior: PriorProvider, p: Position) -> tuple[float, float]:
    """Entropy of the prior at ``p`` and its candidate-move count ``exp(H)``.

    Raises:
        NoLegalMovesError: If ``p`` has no legal moves.
    """
    evaluation = prior.evaluate(p)
    if not evaluation.moves:
        from app.notation.fen import serialize_fen

        raise NoLegalMovesError(serialize_fen(p))
    h = entropy(evaluation.probs)
    return h, float(np.exp(h))


def _mean_se(values: list[float]) -> tuple[float, float]:
    if not values:
        return float("nan"), float("nan")
    arr = np.asarray(values)
    se = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return float(arr.mean()), se


@dataclass
class PlyDiversity:
    ply: int
    samples: int
    entropy: float
    entropy_se: float
    candidates: float
    candidates_se: float
    iida_ratio: float

    @property
    def equivalent_sequences(self) -> float:
        return float(np.exp(self.entropy))


@dataclass
class DiversityCurve:
    plies: list[PlyDiversity] = field(default_factory=list)
    sample_count: int = 0
    exact: bool = False
    final_surprisals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def entropy_at(self, t: int) -> float:
        return self.plies[t - 1].entropy

    def candidates_at(self, t: int) -> float:
        return self.plies[t - 1].candidates

    def surprisal_histogram(self, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        """Histogram of ``-log p(s_1..s_T)`` over samples that reached ply T."""
        return np.histogram(self.final_surprisals, bins=bins)


def diversity_curve(
    tree: MoveTree,
    plies: int,
    samples: int,
    seed: int,
    progress: bool = False,
) -> DiversityCurve:
    """Monte Carlo estimate of ``H(t)`` and ``M(t)`` for t = 1..plies.

    Args:
        tree: Move tree to sample from (its probabilities are the prior).
        plies: Horizon T.
        samples: Number of sampled sequences.
        seed: Seed of the sampling generator.
        progress: Show a progress bar on stderr.
    """
    if plies < 1:
        raise ValueError("plies must be >= 1")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    surprisals: list[list[float]] = [[] for _ in range(plies)]
    candidates: list[list[float]] = [[] for _ in range(plies)]
    ratios: list[list[float]] = [[] for _ in range(plies)]

    for _ in tqdm(range(samples), desc="diversity", unit="seq", disable=not progress):
        state: Any = tree.root()
        log_p = 0.0
        for t in range(plies):
            labels, probs = tree.expand(state)
            if not labels:
                break
            m = float(np.exp(entropy(probs)))
            index = sample_index(probs, rng)
            log_p += float(np.log(probs[index]))
            surprisals[t].append(-log_p)
            candidates[t].append(m)
            ratios[t].append(m / np.sqrt(len(labels)))
            state = tree.child(state, labels[index])

    curve = DiversityCurve(sample_count=samples, final_surprisals=np.asarray(surprisals[-1]))
    for t in range(plies):
        h, h_se = _mean_se(surprisals[t])
        m, m_se = _mean_se(candidates[t])
        ratio, _ = _mean_se(ratios[t])
        curve.plies.append(
            PlyDiversity(t + 1, len(surprisals[t]), h, h_se, m, m_se, ratio)
        )
    logger.debug("Diversity: %d sequences over %d plies", samples, plies)
    return curve


def exact_diversity(tree: MoveTree, plies: int) -> DiversityCurve:
    """Exact ``H(t)`` and ``M(t)`` by enumerating every sequence.

    Values are conditional on reaching ply t, matching the Monte Carlo
    estimator. Exponential in ``plies``; meant for small horizons.
    """
    if plies < 1:
        raise ValueError("plies must be >= 1")
    mass = np.zeros(plies)
    surprisal = np.zeros(plies)
    candidate = np.zeros(plies)
    ratio = np.zeros(plies)
    finals: list[float] = []

    def walk(state: Any, t: int, log_p: float) -> None:
        labels, probs = tree.expand(state)
        if t >= plies or not labels:
            return
        m = float(np.exp(entropy(probs)))
        for label, prob in zip(labels, probs):
            if prob <= 0:
                continue
            weight = float(np.exp(log_p)) * prob
            next_log_p = log_p + float(np.log(prob))
            mass[t] += weight
            surprisal[t] += weight * -next_log_p
            candidate[t] += weight * m
            ratio[t] += weight * m / np.sqrt(len(labels))
            if t == plies - 1:
                finals.append(-next_log_p)
            walk(tree.child(state, label), t + 1, next_log_p)

    walk(tree.root(), 0, 0.0)
    curve = DiversityCurve(exact=True, final_surprisals=np.asarray(finals))
    for t in range(plies):
        reached = mass[t]
        if reached > 0:
            values = (surprisal[t] / reached, candidate[t] / reached, ratio[t] / reached)
        else:
            values = (float("nan"),) * 3
        curve.plies.append(
            PlyDiversity(t + 1, 0, values[0], 0.0, values[1], 0.0, values[2])
        )
    return curve

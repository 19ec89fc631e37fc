"""
Relative entropy between the opening trees of two priors.

``D_KL[p || q]`` over move sequences of up to T plies, estimated as the mean of
``log p(s) - log q(s)`` for sequences ``s`` sampled from p, or computed exactly
by enumeration. Both need q to give positive probability to every move p can
play; a move q does not allow raises SupportViolationError.
"""
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from tqdm import tqdm

from app.core.exceptions import SupportViolationError
from app.core.logging import get_logger
from app.stats.trees import Labels, MoveTree, sample_index

logger = get_logger(__name__)


@dataclass
class KlEstimate:
    nats: float
    standard_error: float
    sample_count: int
    plies: int
    exact: bool = False
    log_ratios: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def bits(self) -> float:
        return self.nats / float(np.log(2.0))

    def log_ratio_histogram(self, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.log_ratios, bins=bins)


def _q_probability(
    q_tree: MoveTree, state: Any, label: str, p_tree: MoveTree
) -> float:
    q_labels, q_probs = q_tree.expand(state)
    lookup = dict(zip(q_labels, q_probs))
    if label not in lookup:
        detail = "terminal under q" if not q_labels else "move not legal under q"
        raise SupportViolationError(p_tree.describe(state), label, detail)
    prob = float(lookup[label])
    if prob <= 0:
        raise SupportViolationError(
            p_tree.describe(state), label, "q assigns zero probability"
        )
    return prob


def _check_subset(p_labels: Labels, q_tree: MoveTree, state: Any, p_tree: MoveTree) -> None:
    q_labels = set(q_tree.expand(state)[0])
    for label in p_labels:
        if label not in q_labels:
            raise SupportViolationError(
                p_tree.describe(state), label, "move not legal under q"
            )


def kl_divergence(
    p_tree: MoveTree,
    q_tree: MoveTree,
    plies: int,
    samples: int,
    seed: int,
    progress: bool = False,
) -> KlEstimate:
    """Monte Carlo ``D_KL[p || q]`` over sequences of up to ``plies`` moves.

    Every sampled state is checked: p's legal moves must all be legal under q.

    Raises:
        SupportViolationError: With the offending position and move.
    """
    if plies < 1 or samples < 1:
        raise ValueError("plies and samples must be >= 1")
    rng = np.random.default_rng(seed)
    ratios = np.zeros(samples)
    for n in tqdm(range(samples), desc="kl", unit="seq", disable=not progress):
        state: Any = p_tree.root()
        log_ratio = 0.0
        for _ in range(plies):
            labels, probs = p_tree.expand(state)
            if not labels:
                break
            _check_subset(labels, q_tree, state, p_tree)
            index = sample_index(probs, rng)
            label = labels[index]
            log_ratio += float(np.log(probs[index])) - np.log(
                _q_probability(q_tree, state, label, p_tree)
            )
            state = p_tree.child(state, label)
        ratios[n] = log_ratio

    se = float(ratios.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    logger.debug("KL estimate %.6f +- %.6f nats from %d sequences", ratios.mean(), se, samples)
    return KlEstimate(
        nats=float(ratios.mean()),
        standard_error=se,
        sample_count=samples,
        plies=plies,
        log_ratios=ratios,
    )


def exact_kl_divergence(p_tree: MoveTree, q_tree: MoveTree, plies: int) -> KlEstimate:
    """``D_KL[p || q]`` by enumerating all sequences of p up to ``plies`` moves."""
    if plies < 1:
        raise ValueError("plies must be >= 1")
    total = 0.0

    def walk(state: Any, depth: int, log_p: float, log_q: float) -> None:
        nonlocal total
        labels, probs = p_tree.expand(state) if depth < plies else ((), None)
        if not labels:
            total += float(np.exp(log_p)) * (log_p - log_q)
            return
        _check_subset(labels, q_tree, state, p_tree)
        for label, prob in zip(labels, probs):
            if prob <= 0:
                continue
            q_prob = _q_probability(q_tree, state, label, p_tree)
            walk(
                p_tree.child(state, label),
                depth + 1,
                log_p + np.log(prob),
                log_q + np.log(q_prob),
            )

    walk(p_tree.root(), 0, 0.0, 0.0)
    return KlEstimate(nats=total, standard_error=0.0, sample_count=0, plies=plies, exact=True)

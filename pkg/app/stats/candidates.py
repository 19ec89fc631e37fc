"""
Combined-prior candidate analysis.

A player Q who wants to cover the candidate moves of player P mixes the two
priors into ``r_i = max(p_i, q_i) / sum_j max(p_j, q_j)``. The number of
additional candidates Q should consider at a state is ``m_r - m_q`` with
``m_x = exp(H(x))``; it never exceeds ``m_p`` because ``m_r <= m_p + m_q``.
"""
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from tqdm import tqdm

from app.core.exceptions import SupportMismatchError
from app.core.logging import get_logger
from app.stats.diversity import entropy
from app.stats.trees import Labels, MoveTree, sample_index

logger = get_logger(__name__)

BOUND_TOLERANCE = 1e-9


def _as_distribution(probs: np.ndarray, name: str) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if np.any(probs < 0) or not np.isclose(probs.sum(), 1.0, atol=1e-6):
        raise ValueError(f"{name} must be non-negative and sum to 1")
    return probs


def combined_prior(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Normalised elementwise maximum of two distributions over one move list."""
    p = _as_distribution(p, "p")
    q = _as_distribution(q, "q")
    if p.shape != q.shape:
        raise SupportMismatchError(f"p has {p.size} entries but q has {q.size}")
    top = np.maximum(p, q)
    return top / top.sum()


@dataclass(frozen=True)
class CandidateCounts:
    m_p: float
    m_q: float
    m_r: float

    @property
    def additional(self) -> float:
        return self.m_r - self.m_q

    @property
    def slack(self) -> float:
        """``m_p + m_q - m_r``; negative only if the bound is broken."""
        return self.m_p + self.m_q - self.m_r


def candidate_counts(p: np.ndarray, q: np.ndarray) -> CandidateCounts:
    r = combined_prior(p, q)
    return CandidateCounts(
        m_p=float(np.exp(entropy(p))),
        m_q=float(np.exp(entropy(q))),
        m_r=float(np.exp(entropy(r))),
    )


def align(
    p_labels: Labels, p_probs: np.ndarray, q_labels: Labels, q_probs: np.ndarray
) -> tuple[Labels, np.ndarray, np.ndarray]:
    """Put two labelled distributions on their union of labels, zero-padded.

    Raises:
        SupportMismatchError: On duplicate labels.
    """
    if len(set(p_labels)) != len(p_labels) or len(set(q_labels)) != len(q_labels):
        raise SupportMismatchError("Duplicate move labels cannot be aligned")
    union = tuple(sorted(set(p_labels) | set(q_labels)))
    index = {label: i for i, label in enumerate(union)}
    p = np.zeros(len(union))
    q = np.zeros(len(union))
    p[[index[x] for x in p_labels]] = p_probs
    q[[index[x] for x in q_labels]] = q_probs
    return union, p, q


@dataclass
class PlyCandidates:
    ply: int
    samples: int
    additional: float
    additional_se: float
    m_p: float
    m_q: float
    m_r: float
    bound_violations: int
    min_slack: float
    max_slack: float


@dataclass
class AdditionalCandidatesCurve:
    plies: list[PlyCandidates] = field(default_factory=list)
    sample_count: int = 0

    @property
    def bound_violations(self) -> int:
        return sum(p.bound_violations for p in self.plies)

    @property
    def max_slack(self) -> float:
        slacks = [p.max_slack for p in self.plies if p.samples]
        return max(slacks) if slacks else float("nan")


def additional_candidates(
    p_tree: MoveTree,
    q_tree: MoveTree,
    plies: int,
    samples: int,
    seed: int,
    progress: bool = False,
) -> AdditionalCandidatesCurve:
    """``A_q(t)``: mean additional candidates along sequences sampled from p.

    Raises:
        SupportMismatchError: If move lists cannot be aligned, or q sees a
            terminal position where p still has moves.
    """
    if plies < 1 or samples < 1:
        raise ValueError("plies and samples must be >= 1")
    rng = np.random.default_rng(seed)
    rows: list[list[CandidateCounts]] = [[] for _ in range(plies)]

    for _ in tqdm(range(samples), desc="candidates", unit="seq", disable=not progress):
        state: Any = p_tree.root()
        for t in range(plies):
            p_labels, p_probs = p_tree.expand(state)
            if not p_labels:
                break
            q_labels, q_probs = q_tree.expand(state)
            if not q_labels:
                raise SupportMismatchError(
                    f"q has no moves at '{p_tree.describe(state)}' where p has {len(p_labels)}"
                )
            _, p_vec, q_vec = align(p_labels, p_probs, q_labels, q_probs)
            rows[t].append(candidate_counts(p_vec, q_vec))
            index = sample_index(p_probs, rng)
            state = p_tree.child(state, p_labels[index])

    curve = AdditionalCandidatesCurve(sample_count=samples)
    for t, counts in enumerate(rows):
        n = len(counts)
        if n == 0:
            nan = float("nan")
            curve.plies.append(PlyCandidates(t + 1, 0, nan, nan, nan, nan, nan, 0, nan, nan))
            continue
        additional = np.array([c.additional for c in counts])
        slack = np.array([c.slack for c in counts])
        curve.plies.append(
            PlyCandidates(
                ply=t + 1,
                samples=n,
                additional=float(additional.mean()),
                additional_se=float(additional.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
                m_p=float(np.mean([c.m_p for c in counts])),
                m_q=float(np.mean([c.m_q for c in counts])),
                m_r=float(np.mean([c.m_r for c in counts])),
                bound_violations=int(np.sum(slack < -BOUND_TOLERANCE)),
                min_slack=float(slack.min()),
                max_slack=float(slack.max()),
            )
        )
    if curve.bound_violations:
        logger.warning("Candidate bound violated at %d state(s)", curve.bound_violations)
    return curve

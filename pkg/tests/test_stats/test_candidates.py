import numpy as np
import pytest

from app.core.exceptions import SupportMismatchError
from app.engine.priors import MaterialPrior, UniformPrior
from app.stats.candidates import (
    BOUND_TOLERANCE,
    additional_candidates,
    align,
    candidate_counts,
    combined_prior,
)
from app.stats.trees import BranchingTree, ChessTree


def _random_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = int(rng.integers(1, 40))
    p = rng.dirichlet(np.full(n, rng.uniform(0.05, 3.0)))
    q = rng.dirichlet(np.full(n, rng.uniform(0.05, 3.0)))
    # Knock out some support to get near-disjoint cases.
    if n > 2 and rng.random() < 0.3:
        p[: n // 2] = 0.0
        q[n // 2 :] = 0.0
        p, q = p / p.sum(), q / q.sum()
    return p, q


def test_combined_prior_is_normalised_maximum() -> None:
    r = combined_prior(np.array([0.7, 0.3, 0.0]), np.array([0.2, 0.2, 0.6]))
    assert r == pytest.approx(np.array([0.7, 0.3, 0.6]) / 1.6)


def test_combined_prior_validates_inputs() -> None:
    with pytest.raises(ValueError):
        combined_prior(np.array([0.5, 0.6]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        combined_prior(np.array([]), np.array([]))
    with pytest.raises(SupportMismatchError):
        combined_prior(np.array([0.5, 0.5]), np.array([1.0, 0.0, 0.0]))


def test_identical_priors_add_nothing() -> None:
    p = np.array([0.1, 0.2, 0.7])
    counts = candidate_counts(p, p)
    assert counts.additional == pytest.approx(0.0)
    assert counts.m_r == pytest.approx(counts.m_p)


def test_bound_is_tight_for_disjoint_uniform_supports() -> None:
    counts = candidate_counts(np.array([0.5, 0.5, 0.0, 0.0]), np.array([0.0, 0.0, 0.5, 0.5]))
    assert counts.m_r == pytest.approx(4.0)
    assert counts.additional == pytest.approx(counts.m_p)
    assert counts.slack == pytest.approx(0.0)


def test_bound_holds_on_random_distributions() -> None:
    rng = np.random.default_rng(12)
    for _ in range(5_000):
        counts = candidate_counts(*_random_pair(rng))
        assert counts.additional <= counts.m_p + BOUND_TOLERANCE


@pytest.mark.slow
def test_bound_holds_on_a_million_random_distributions() -> None:
    rng = np.random.default_rng(2024)
    for _ in range(1_000_000):
        counts = candidate_counts(*_random_pair(rng))
        assert counts.slack >= -BOUND_TOLERANCE


def test_align_pads_missing_moves() -> None:
    labels, p, q = align(("e2e4", "g1f3"), np.array([0.6, 0.4]), ("d2d4", "e2e4"), np.array([0.5, 0.5]))
    assert labels == ("d2d4", "e2e4", "g1f3")
    assert p == pytest.approx([0.0, 0.6, 0.4])
    assert q == pytest.approx([0.5, 0.5, 0.0])


def test_align_rejects_duplicates() -> None:
    with pytest.raises(SupportMismatchError):
        align(("e2e4", "e2e4"), np.array([0.5, 0.5]), ("e2e4",), np.array([1.0]))


def test_branching_trees_give_constant_curve() -> None:
    p_tree = BranchingTree(3, 3, np.array([0.6, 0.3, 0.1]))
    q_tree = BranchingTree(3, 3, np.array([0.1, 0.1, 0.8]))
    expected = candidate_counts(p_tree.probs, q_tree.probs)
    curve = additional_candidates(p_tree, q_tree, plies=3, samples=25, seed=0)
    for row in curve.plies:
        assert row.samples == 25
        assert row.additional == pytest.approx(expected.additional)
        assert row.additional_se == pytest.approx(0.0)
        assert row.bound_violations == 0
    assert curve.bound_violations == 0


def test_chess_variants_respect_bound() -> None:
    curve = additional_candidates(
        ChessTree(UniformPrior(), "torpedo"),
        ChessTree(MaterialPrior(), "classical"),
        plies=4,
        samples=40,
        seed=6,
    )
    assert curve.bound_violations == 0
    assert all(row.samples == 40 for row in curve.plies)
    assert all(row.min_slack >= -BOUND_TOLERANCE for row in curve.plies)


def test_q_terminal_where_p_has_moves() -> None:
    p_tree = BranchingTree(2, 2)
    q_tree = BranchingTree(2, 1)
    with pytest.raises(SupportMismatchError):
        additional_candidates(p_tree, q_tree, plies=2, samples=3, seed=0)


def test_short_trees_report_empty_plies() -> None:
    curve = additional_candidates(BranchingTree(2, 1), BranchingTree(2, 1), plies=2, samples=5, seed=0)
    assert curve.plies[1].samples == 0
    assert np.isnan(curve.plies[1].additional)

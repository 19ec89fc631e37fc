import numpy as np
import pytest

from app.core.exceptions import SupportViolationError
from app.engine.priors import MaterialPrior, UniformPrior
from app.stats.divergence import exact_kl_divergence, kl_divergence
from app.stats.trees import BranchingTree, ChessTree


def _single_step_kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def test_identical_priors_give_zero() -> None:
    tree = ChessTree(UniformPrior(), "classical")
    estimate = kl_divergence(tree, ChessTree(UniformPrior(), "classical"), plies=3, samples=30, seed=1)
    assert estimate.nats == 0.0
    assert estimate.standard_error == 0.0
    assert estimate.sample_count == 30


def test_exact_closed_form_on_branching_trees() -> None:
    p = np.array([1.0, 0.0])
    q = np.array([0.6, 0.4])
    estimate = exact_kl_divergence(BranchingTree(2, 1, p), BranchingTree(2, 1, q), plies=1)
    assert estimate.nats == pytest.approx(np.log(1 / 0.6))
    assert estimate.nats == pytest.approx(0.5108, abs=1e-4)
    assert estimate.exact


@pytest.mark.parametrize("plies", [1, 2, 4])
def test_divergence_adds_up_over_independent_plies(plies: int) -> None:
    p = np.array([0.5, 0.25, 0.25])
    q = np.array([0.2, 0.2, 0.6])
    p_tree = BranchingTree(3, plies, p)
    q_tree = BranchingTree(3, plies, q)
    expected = plies * _single_step_kl(p, q)
    assert exact_kl_divergence(p_tree, q_tree, plies).nats == pytest.approx(expected)
    sampled = kl_divergence(p_tree, q_tree, plies, samples=20_000, seed=4)
    assert abs(sampled.nats - expected) < 5 * sampled.standard_error
    assert sampled.bits == pytest.approx(sampled.nats / np.log(2))


def test_superset_variant_is_a_valid_q() -> None:
    estimate = kl_divergence(
        ChessTree(UniformPrior(), "classical"),
        ChessTree(UniformPrior(), "pawnsideways"),
        plies=4,
        samples=50,
        seed=2,
    )
    # Uniform q spreads over at least as many moves as p at every state.
    assert np.all(estimate.log_ratios >= -1e-12)
    assert estimate.nats >= 0.0


def test_moves_missing_under_q_raise() -> None:
    with pytest.raises(SupportViolationError) as excinfo:
        kl_divergence(
            ChessTree(UniformPrior(), "pawnsideways"),
            ChessTree(UniformPrior(), "classical"),
            plies=4,
            samples=50,
            seed=2,
        )
    # Lateral pawn moves are the only ones classical rules lack.
    move = excinfo.value.move
    assert move[0] != move[2] and move[1] == move[3]
    assert "variant=pawnsideways" in excinfo.value.fen


def test_exact_mode_raises_on_missing_moves() -> None:
    with pytest.raises(SupportViolationError):
        exact_kl_divergence(
            ChessTree(UniformPrior(), "classical"),
            ChessTree(UniformPrior(), "pawnonesquare"),
            plies=1,
        )


def test_zero_probability_under_q_raises() -> None:
    p_tree = BranchingTree(2, 1, np.array([0.5, 0.5]))
    q_tree = BranchingTree(2, 1, np.array([1.0, 0.0]))
    with pytest.raises(SupportViolationError):
        exact_kl_divergence(p_tree, q_tree, plies=1)


def test_material_prior_matches_uniform_without_captures() -> None:
    estimate = exact_kl_divergence(
        ChessTree(MaterialPrior(), "classical"),
        ChessTree(UniformPrior(), "classical"),
        plies=1,
    )
    # No captures from the start: both priors are uniform.
    assert estimate.nats == pytest.approx(0.0, abs=1e-12)


def test_log_ratio_histogram() -> None:
    p_tree = BranchingTree(2, 2, np.array([0.7, 0.3]))
    q_tree = BranchingTree(2, 2, np.array([0.5, 0.5]))
    estimate = kl_divergence(p_tree, q_tree, plies=2, samples=100, seed=0)
    counts, _ = estimate.log_ratio_histogram(bins=5)
    assert counts.sum() == 100

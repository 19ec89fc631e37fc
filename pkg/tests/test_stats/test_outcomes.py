import numpy as np
import pytest
from scipy import integrate
from scipy.stats import beta

from app.core.exceptions import DegenerateDataError, UnfinishedGameError
from app.notation.fen import STANDARD_START
from app.rules import GameState
from app.schemas.game import GameRecord, GameResult
from app.stats.outcomes import (
    OutcomeCounts,
    count_outcomes,
    draw_rate_comparison,
    empirical_expected_score,
    expected_score_comparison,
    posterior_summary,
    sample_posterior,
)


def _game(state: GameState, capped: bool = False) -> GameRecord:
    return GameRecord(
        variant="classical",
        start_fen=STANDARD_START,
        result=GameResult(state=state),
        capped=capped,
    )


def _draw_less_oracle(a: OutcomeCounts, b: OutcomeCounts) -> float:
    """P(draw_A < draw_B) from the Beta marginals by numerical integration."""
    pa, pb = a.dirichlet_params, b.dirichlet_params
    da = beta(pa[1], pa.sum() - pa[1])
    db = beta(pb[1], pb.sum() - pb[1])
    value, _ = integrate.quad(lambda x: da.pdf(x) * db.sf(x), 0.0, 1.0)
    return value


def test_count_outcomes_treats_capped_games_as_draws() -> None:
    games = [
        _game(GameState.WHITE_WINS),
        _game(GameState.BLACK_WINS),
        _game(GameState.DRAW),
        _game(GameState.DRAW, capped=True),
    ]
    assert count_outcomes(games) == OutcomeCounts(1, 2, 1)


def test_unfinished_game_rejected() -> None:
    with pytest.raises(UnfinishedGameError):
        count_outcomes([_game(GameState.DRAW), _game(GameState.ONGOING)])


def test_negative_counts_rejected() -> None:
    with pytest.raises(ValueError):
        OutcomeCounts(-1, 0, 0)


def test_counts_add() -> None:
    assert OutcomeCounts(1, 2, 3) + OutcomeCounts(4, 5, 6) == OutcomeCounts(5, 7, 9)


def test_identical_sets_compare_at_one_half() -> None:
    counts = OutcomeCounts(30, 40, 30)
    assert draw_rate_comparison(counts, counts, 100_000, seed=1) == pytest.approx(0.5, abs=0.01)
    assert expected_score_comparison(counts, counts, 100_000, seed=1) == pytest.approx(
        0.5, abs=0.01
    )


@pytest.mark.parametrize(
    "a,b",
    [
        (OutcomeCounts(10, 20, 10), OutcomeCounts(8, 30, 2)),
        (OutcomeCounts(0, 0, 0), OutcomeCounts(3, 1, 0)),
        (OutcomeCounts(50, 5, 45), OutcomeCounts(40, 15, 45)),
    ],
)
def test_draw_rate_comparison_matches_integral(a: OutcomeCounts, b: OutcomeCounts) -> None:
    estimate = draw_rate_comparison(a, b, 200_000, seed=7)
    assert estimate == pytest.approx(_draw_less_oracle(a, b), abs=0.005)


def test_expected_score_comparison_direction() -> None:
    strong = OutcomeCounts(60, 30, 10)
    weak = OutcomeCounts(20, 30, 50)
    assert expected_score_comparison(strong, weak, 50_000, seed=3) > 0.99
    assert expected_score_comparison(weak, strong, 50_000, seed=3) < 0.01


def test_comparisons_are_seeded() -> None:
    a, b = OutcomeCounts(3, 4, 5), OutcomeCounts(5, 4, 3)
    assert draw_rate_comparison(a, b, 1000, seed=9) == draw_rate_comparison(a, b, 1000, seed=9)


def test_zero_samples_rejected() -> None:
    with pytest.raises(ValueError):
        draw_rate_comparison(OutcomeCounts(), OutcomeCounts(), 0, seed=1)


def test_empirical_expected_score() -> None:
    assert empirical_expected_score(OutcomeCounts(3, 2, 5)) == pytest.approx(0.4)
    with pytest.raises(DegenerateDataError):
        empirical_expected_score(OutcomeCounts())


def test_posterior_summary() -> None:
    counts = OutcomeCounts(8, 1, 1)
    summary = posterior_summary(counts, 50_000, seed=2)
    assert summary.win.mean == pytest.approx(9 / 13)
    assert summary.win.low < summary.win.mean < summary.win.high
    assert summary.win.low == pytest.approx(beta(9, 4).ppf(0.025))
    assert summary.score.mean == pytest.approx((9 + 1) / 13)
    assert summary.score.low < summary.score.mean < summary.score.high
    means = summary.win.mean + summary.draw.mean + summary.lose.mean
    assert means == pytest.approx(1.0)


def test_uniform_prior_without_games() -> None:
    summary = posterior_summary(OutcomeCounts(), 20_000, seed=0)
    assert summary.draw.mean == pytest.approx(1 / 3)
    assert np.isclose(summary.score.mean, 0.5)


# ---------------------------------------------------------------------------
# Expected score and sampler checks
# ---------------------------------------------------------------------------


def _score_cdf(params: np.ndarray, s: float) -> float:
    """P(win + draw / 2 <= s), integrating over the win share.

    Given the win share w, the loss share of the remainder l / (1 - w) is
    Beta(alpha_lose, alpha_draw).
    """
    a_win, a_draw, a_lose = params
    win = beta(a_win, a_draw + a_lose)
    rest = beta(a_lose, a_draw)
    c = 2 * s - 1
    value, _ = integrate.quad(
        lambda w: win.pdf(w) * rest.sf((w - c) / (1 - w)), 0.0, 1.0, limit=200
    )
    return value


def _score_greater_oracle(a: OutcomeCounts, b: OutcomeCounts) -> float:
    """P(score_A > score_B) with score_B's CDF tabulated by quadrature."""
    grid = np.linspace(0.0, 1.0, 401)
    cdf_b = np.array([_score_cdf(b.dirichlet_params, s) for s in grid])
    a_win, a_draw, a_lose = a.dirichlet_params
    win = beta(a_win, a_draw + a_lose)
    rest = beta(a_lose, a_draw)

    def integrand(u: float, w: float) -> float:
        score = w + (1 - w) * (1 - u) / 2
        return win.pdf(w) * rest.pdf(u) * np.interp(score, grid, cdf_b)

    value, _ = integrate.dblquad(integrand, 0.0, 1.0, 0.0, 1.0)
    return value


def test_expected_score_comparison_matches_integral() -> None:
    a, b = OutcomeCounts(6, 2, 2), OutcomeCounts(2, 2, 6)
    oracle = _score_greater_oracle(a, b)
    assert 0.9 < oracle < 1.0
    estimate = expected_score_comparison(a, b, 200_000, seed=13)
    assert estimate == pytest.approx(oracle, abs=0.005)
    reverse = expected_score_comparison(b, a, 200_000, seed=13)
    assert reverse == pytest.approx(1 - oracle, abs=0.005)


@pytest.mark.parametrize(
    "a,b",
    [
        (OutcomeCounts(6, 2, 2), OutcomeCounts(2, 2, 6)),
        (OutcomeCounts(10, 20, 10), OutcomeCounts(8, 30, 2)),
        (OutcomeCounts(0, 0, 0), OutcomeCounts(0, 5, 0)),
    ],
)
def test_draw_rate_comparisons_are_complementary(
    a: OutcomeCounts, b: OutcomeCounts
) -> None:
    forward = draw_rate_comparison(a, b, 100_000, seed=21)
    backward = draw_rate_comparison(b, a, 100_000, seed=22)
    assert forward + backward == pytest.approx(1.0, abs=0.01)


@pytest.mark.parametrize(
    "counts",
    [OutcomeCounts(), OutcomeCounts(6, 2, 2), OutcomeCounts(40, 55, 5)],
)
def test_posterior_sampler_mean_within_three_standard_errors(
    counts: OutcomeCounts,
) -> None:
    samples = sample_posterior(counts, 20_000, np.random.default_rng(4))
    assert samples.shape == (20_000, 3)
    assert np.allclose(samples.sum(axis=1), 1.0)
    alpha = counts.dirichlet_params
    expected = alpha / alpha.sum()
    se = samples.std(axis=0, ddof=1) / np.sqrt(len(samples))
    assert np.all(np.abs(samples.mean(axis=0) - expected) < 3 * se)

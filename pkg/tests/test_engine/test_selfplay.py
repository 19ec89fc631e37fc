import numpy as np
import pytest
from scipy import stats
from scipy.special import softmax

from app.core.exceptions import BadStartError
from app.engine.priors import MaterialPrior, UniformPrior
from app.engine.search import SearchConfig
from app.engine.selfplay import game_seed, generate_set, play_game, sample_visit_index
from app.notation.records import replay_game, result_consistent
from app.rules import GameState, TerminationReason
from app.stats.utilization import special_move_utilization

SMALL = SearchConfig(simulations=8, softmax_plies=4, max_game_plies=40, seed=3)


def test_game_seed_is_stable_and_distinct() -> None:
    assert game_seed(7, 0) == game_seed(7, 0)
    seeds = {game_seed(7, i) for i in range(50)}
    assert len(seeds) == 50
    assert game_seed(7, 0) != game_seed(8, 0)


def test_play_game_is_reproducible() -> None:
    a = play_game("pawnsideways", UniformPrior(), SMALL)
    b = play_game("pawnsideways", UniformPrior(), SMALL)
    assert a == b
    assert a.model_dump_json() == b.model_dump_json()


def test_capped_game_is_unfinished_draw() -> None:
    cfg = SMALL.model_copy(update={"max_game_plies": 3})
    record = play_game("classical", UniformPrior(), cfg)
    assert record.capped
    assert record.plies == 3
    assert record.result.state is GameState.DRAW
    assert record.result.reason is TerminationReason.NONE
    assert result_consistent(record, replay_game(record))


def test_game_replays_and_result_agrees() -> None:
    record = play_game("selfcapture", MaterialPrior(), SMALL.model_copy(update={"seed": 11}))
    replay = replay_game(record)
    assert result_consistent(record, replay)
    assert record.start_fen.endswith("variant=selfcapture")


def test_mate_in_one_start_is_finished() -> None:
    record = play_game(
        "classical",
        UniformPrior(),
        SearchConfig(simulations=200, softmax_plies=0, root_noise_weight=0.0, seed=1),
        start_fen="6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1",
    )
    assert [m.lan for m in record.moves] == ["a1a8"]
    assert record.result.state is GameState.WHITE_WINS
    assert record.result.reason is TerminationReason.CHECKMATE


def test_record_search_stores_visits() -> None:
    record = play_game("classical", UniformPrior(), SMALL, record_search=True)
    assert len(record.per_ply) == record.plies
    assert [p.chosen_by for p in record.per_ply[:4]] == ["softmax"] * 4
    assert all(p.chosen_by == "argmax" for p in record.per_ply[4:])
    assert all(sum(p.visits.values()) == SMALL.simulations for p in record.per_ply)


def test_bad_start_rejected() -> None:
    with pytest.raises(BadStartError):
        play_game("classical", UniformPrior(), SMALL, start_fen="8/8/8/8/8/8/8/8 w - - 0 1")


def test_generate_set_seeds_games_by_index() -> None:
    records = generate_set("torpedo", UniformPrior(), SMALL, 3, progress=False)
    assert [r.seed for r in records] == [game_seed(SMALL.seed, i) for i in range(3)]
    single = play_game("torpedo", UniformPrior(), SMALL.model_copy(update={"seed": records[1].seed}))
    assert single == records[1]


def test_generate_set_cycles_openings() -> None:
    fens = [
        "rnbqkb1r/pppppppp/5n2/8/4P3/8/PPPP1PPP/RNBQKBNR w KQkq - 1 2",
        "rnbqkbnr/ppppp1pp/8/5p2/3P4/8/PPP1PPPP/RNBQKBNR w KQkq f6 0 2",
    ]
    records = generate_set(
        "classical",
        UniformPrior(),
        SMALL,
        3,
        opening_fens=fens,
        opening_names=["alekhine", "dutch"],
        progress=False,
    )
    assert [r.opening for r in records] == ["alekhine", "dutch", "alekhine"]
    assert records[2].start_fen == fens[0]


def test_generate_set_calls_back_in_order() -> None:
    seen = []
    records = generate_set("classical", UniformPrior(), SMALL, 2, progress=False, on_record=seen.append)
    assert seen == records


def test_generate_set_independent_of_worker_count() -> None:
    cfg = SMALL.model_copy(update={"max_game_plies": 12})
    serial = generate_set("pawnback", UniformPrior(), cfg, 4, workers=1, progress=False)
    parallel = generate_set("pawnback", UniformPrior(), cfg, 4, workers=2, progress=False)
    assert [r.model_dump_json() for r in serial] == [r.model_dump_json() for r in parallel]


def test_generate_set_validates_before_playing() -> None:
    with pytest.raises(ValueError):
        generate_set("classical", UniformPrior(), SMALL, 0, progress=False)
    with pytest.raises(BadStartError):
        generate_set(
            "pawnonesquare",
            UniformPrior(),
            SMALL,
            1,
            opening_fens=["rnbqkbnr/ppppp1pp/8/5p2/3P4/8/PPP1PPPP/RNBQKBNR w KQkq f6 0 2"],
            progress=False,
        )


# ---------------------------------------------------------------------------
# Move sampling
# ---------------------------------------------------------------------------


def test_visit_sampler_matches_softmax_distribution() -> None:
    visits = np.array([3, 2, 2, 1, 0])
    expected = softmax(visits.astype(float))
    rng = np.random.default_rng(2024)
    draws = [sample_visit_index(visits, 1.0, rng) for _ in range(10_000)]
    observed = np.bincount(draws, minlength=len(visits))
    assert observed.sum() == 10_000
    _, p_value = stats.chisquare(observed, expected * 10_000)
    assert p_value > 1e-3


def test_visit_sampler_concentrates_on_dominant_move() -> None:
    rng = np.random.default_rng(0)
    draws = [sample_visit_index(np.array([40, 0, 0]), 1.0, rng) for _ in range(200)]
    assert set(draws) == {0}


@pytest.mark.parametrize(
    "variant, feature",
    [("torpedo", "torpedo"), ("pawnsideways", "lateral"), ("selfcapture", "self_capture")],
)
def test_variant_games_use_their_special_moves(variant: str, feature: str) -> None:
    cfg = SearchConfig(simulations=8, softmax_plies=60, max_game_plies=60, seed=17)
    records = generate_set(variant, UniformPrior(), cfg, 4, progress=False)
    report = special_move_utilization(records)
    assert report.features[feature].games_with >= 1
    assert report.features[feature].moves >= report.features[feature].games_with

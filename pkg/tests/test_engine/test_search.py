import math
from dataclasses import dataclass

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import NoLegalMovesError
from app.engine.priors import Evaluation, MaterialPrior, UniformPrior
from app.engine.search import Node, SearchConfig, backup, search
from app.notation.fen import parse_fen
from app.rules import initial_position, legal_moves

QUIET = {"root_noise_weight": 0.0}


def _cfg(**overrides) -> SearchConfig:
    return SearchConfig(**{"simulations": 64, "seed": 1, **overrides})


def test_visits_sum_to_simulations() -> None:
    p = initial_position("classical")
    result = search(p, UniformPrior(), _cfg(), np.random.default_rng(0))
    assert result.moves == legal_moves(p)
    assert int(result.visits.sum()) == 64
    assert sum(result.visit_map().values()) == 64


def test_first_simulations_follow_move_order_under_uniform_prior() -> None:
    # Ties go to the lowest index, so with equal priors and zero values the
    # first simulations visit the moves in LAN order.
    p = initial_position("classical")
    result = search(p, UniformPrior(), _cfg(simulations=20, **QUIET), np.random.default_rng(0))
    assert list(result.visits) == [1] * 20


def test_search_finds_mate_in_one() -> None:
    p = parse_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1")
    result = search(p, UniformPrior(), _cfg(simulations=400, **QUIET), np.random.default_rng(0))
    best = result.moves[int(np.argmax(result.visits))]
    assert best.lan == "a1a8"
    assert result.root_value > 0


def test_search_takes_hanging_queen_with_material_prior() -> None:
    p = parse_fen("4k3/8/8/3q4/8/8/8/3RK3 w - - 0 1")
    result = search(p, MaterialPrior(), _cfg(simulations=200, **QUIET), np.random.default_rng(0))
    assert result.moves[int(np.argmax(result.visits))].lan == "d1d5"


def test_root_noise_is_seeded() -> None:
    p = initial_position("torpedo")
    a = search(p, UniformPrior(), _cfg(), np.random.default_rng(5))
    b = search(p, UniformPrior(), _cfg(), np.random.default_rng(5))
    assert np.array_equal(a.visits, b.visits)
    assert np.allclose(a.priors, b.priors)
    assert a.priors.sum() == pytest.approx(1.0)
    assert not np.allclose(a.priors, 1 / len(a.moves))


def test_no_noise_away_from_root() -> None:
    p = initial_position("classical")
    result = search(p, UniformPrior(), _cfg(), np.random.default_rng(5), at_root=False)
    assert np.allclose(result.priors, 1 / 20)


def test_terminal_root_raises() -> None:
    mated = parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3")
    with pytest.raises(NoLegalMovesError):
        search(mated, UniformPrior(), _cfg(), np.random.default_rng(0))


def test_repeated_root_is_terminal() -> None:
    from app.rules.position import repetition_key

    p = initial_position("classical")
    with pytest.raises(NoLegalMovesError):
        search(
            p,
            UniformPrior(),
            _cfg(),
            np.random.default_rng(0),
            history={repetition_key(p): 2},
        )


def test_select_prefers_prior_then_lowest_index() -> None:
    node = Node(position=initial_position("classical"), key=None)
    node.expand(legal_moves(node.position)[:3], np.array([0.2, 0.5, 0.3]))
    node.visits[:] = 1
    assert node.select(1.5) == 1
    node.priors[:] = 1 / 3
    assert node.select(1.5) == 0


@pytest.mark.parametrize(
    "field,value",
    [("simulations", 0), ("c_puct", 0.0), ("root_noise_weight", 1.5), ("softmax_plies", -1)],
)
def test_config_validation(field: str, value) -> None:
    with pytest.raises(ValidationError):
        SearchConfig(**{field: value})


def test_config_defaults_come_from_settings() -> None:
    from app.config import settings

    cfg = SearchConfig()
    assert cfg.simulations == settings.simulations
    assert cfg.c_puct == settings.c_puct


# ---------------------------------------------------------------------------
# Selection and backup on hand-built trees
# ---------------------------------------------------------------------------


def _reference_choice(priors, visits, values, c_puct: float) -> int:
    total = 0.0
    for n in visits:
        total += float(n)
    best, best_score = 0, None
    for i, (prior, n, w) in enumerate(zip(priors, visits, values)):
        q = float(w) / float(n) if n > 0 else 0.0
        u = c_puct * float(prior) * math.sqrt(total) / (1.0 + float(n))
        if best_score is None or q + u > best_score:
            best, best_score = i, q + u
    return best


def _random_node(rng: np.random.Generator, width: int) -> Node:
    node = Node(position=initial_position("classical"), key=None)
    moves = legal_moves(node.position)[:width]
    # Priors from a small grid so that exact ties occur.
    priors = rng.choice([0.1, 0.2, 0.3], size=width)
    node.expand(moves, priors / priors.sum())
    node.visits[:] = rng.integers(0, 4, size=width)
    node.values[:] = [rng.integers(-int(n), int(n) + 1) for n in node.visits]
    return node


def _random_tree(rng: np.random.Generator, depth: int) -> Node:
    root = _random_node(rng, int(rng.integers(2, 6)))
    if depth > 1:
        for i in range(len(root.moves)):
            if root.visits[i] > 0:
                child = _random_tree(rng, depth - 1)
                child.parent = root
                root.children[i] = child
    return root


@pytest.mark.parametrize("c_puct", [0.5, 1.5, 4.0])
def test_select_matches_reference_formula(c_puct: float) -> None:
    rng = np.random.default_rng(42)
    for _ in range(200):
        node = _random_tree(rng, int(rng.integers(1, 4)))
        while node is not None:
            expected = _reference_choice(node.priors, node.visits, node.values, c_puct)
            assert node.select(c_puct) == expected
            node = node.children[expected]


def test_backup_alternates_sign_every_ply() -> None:
    root = Node(position=initial_position("classical"), key=None)
    middle = Node(position=initial_position("classical"), key=None, parent=root)
    lower = Node(position=initial_position("classical"), key=None, parent=middle)
    for node in (root, middle, lower):
        node.expand(legal_moves(node.position)[:3], np.full(3, 1 / 3))

    backup([(root, 2), (middle, 0), (lower, 1)], 0.5)
    assert lower.values[1] == pytest.approx(-0.5)
    assert middle.values[0] == pytest.approx(0.5)
    assert root.values[2] == pytest.approx(-0.5)
    for node, index in ((root, 2), (middle, 0), (lower, 1)):
        assert node.visits[index] == 1
        assert node.visits.sum() == 1


@dataclass(frozen=True)
class _ConstantValuePrior:
    value: float
    name: str = "constant"

    def evaluate(self, p) -> Evaluation:
        moves = legal_moves(p)
        probs = np.full(len(moves), 1.0 / max(len(moves), 1))
        return Evaluation(moves=moves, probs=probs, value=self.value)


def test_root_value_is_negated_leaf_value() -> None:
    p = initial_position("classical")
    cfg = _cfg(simulations=1, **QUIET)
    result = search(p, _ConstantValuePrior(0.25), cfg, np.random.default_rng(0))
    assert result.root_value == pytest.approx(-0.25)


def test_single_legal_move_takes_every_simulation() -> None:
    # Black king a8 can only go to b8.
    p = parse_fen("k7/8/1K6/8/8/8/8/2R5 b - - 0 1")
    assert [m.lan for m in legal_moves(p)] == ["a8b8"]
    result = search(p, UniformPrior(), _cfg(simulations=37), np.random.default_rng(3))
    assert result.visit_map() == {"a8b8": 37}

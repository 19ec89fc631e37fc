"""
Self-play game generation.

The first ``softmax_plies`` moves of a game are sampled in proportion to the
softmax of the root visit counts; later moves take the most visited move
(ties to the lexicographically first LAN). Games that reach the ply cap are
scored as draws and flagged ``capped``.
"""
from collections import Counter
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np
from scipy.special import softmax
from tqdm import tqdm

from app.core.exceptions import BadStartError, LabError
from app.core.logging import get_logger
from app.engine.priors import PriorProvider
from app.engine.search import SearchConfig, search
from app.notation.fen import parse_fen, serialize_fen
from app.rules.movegen import make_move
from app.rules.position import Position, initial_position, repetition_key
from app.rules.status import GameState, TerminationReason, classify
from app.rules.types import VariantConfig, VariantId
from app.schemas.game import GameRecord, GameResult, MoveEntry, PlyInfo

logger = get_logger(__name__)


def game_seed(seed: int, index: int) -> int:
    """Seed of game ``index`` in a set, derived from the set seed by counter."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def sample_visit_index(
    visits: np.ndarray, temperature: float, rng: np.random.Generator
) -> int:
    """Draw a move index with probability softmax(visits / temperature)."""
    probs = softmax(np.asarray(visits, dtype=float) / temperature)
    return int(rng.choice(len(probs), p=probs))


def _start_position(variant: VariantConfig, start_fen: Optional[str]) -> Position:
    if start_fen is None:
        return initial_position(variant)
    try:
        return parse_fen(start_fen, variant)
    except LabError as exc:
        raise BadStartError(f"Bad start position '{start_fen}': {exc}") from exc


def play_game(
    variant: VariantConfig | VariantId | str,
    prior: PriorProvider,
    cfg: SearchConfig,
    start_fen: Optional[str] = None,
    record_search: bool = False,
    opening: Optional[str] = None,
) -> GameRecord:
    """Play one self-play game.

    Args:
        variant: Rule set.
        prior: Provider used by the search.
        cfg: Search parameters; ``cfg.seed`` drives every random choice.
        start_fen: Optional start position in (extended) FEN.
        record_search: Store root visit counts for each ply.
        opening: Optional opening name stored in the record.

    Returns:
        The finished GameRecord.

    Raises:
        BadStartError: If ``start_fen`` is not a legal position of the variant.
    """
    if not isinstance(variant, VariantConfig):
        variant = VariantConfig.of(variant)
    start = _start_position(variant, start_fen)
    position = start
    rng = np.random.default_rng(cfg.seed)
    history: Counter = Counter()
    moves: list[MoveEntry] = []
    per_ply: list[PlyInfo] = []
    capped = False

    while True:
        key = repetition_key(position)
        status = classify(position, history[key] + 1)
        if status.is_terminal:
            result = GameResult(state=status.state, reason=status.reason)
            break
        if len(moves) >= cfg.max_game_plies:
            capped = True
            result = GameResult(state=GameState.DRAW, reason=TerminationReason.NONE)
            break

        outcome = search(position, prior, cfg, rng, at_root=True, history=history)
        if len(moves) < cfg.softmax_plies:
            index = sample_visit_index(outcome.visits, cfg.softmax_temperature, rng)
            chosen_by = "softmax"
        else:
            index = int(np.argmax(outcome.visits))
            chosen_by = "argmax"

        move = outcome.moves[index]
        moves.append(MoveEntry(lan=move.lan, flags=move.flags.names))
        if record_search:
            per_ply.append(PlyInfo(visits=outcome.visit_map(), chosen_by=chosen_by))
        history[key] += 1
        position = make_move(position, move)

    logger.debug(
        "Game seed=%d finished after %d plies: %s (%s)",
        cfg.seed,
        len(moves),
        result.state.value,
        result.reason.value,
    )
    return GameRecord(
        variant=variant.id,
        start_fen=start_fen if start_fen is not None else serialize_fen(start),
        moves=moves,
        result=result,
        capped=capped,
        per_ply=per_ply if record_search else None,
        seed=cfg.seed,
        opening=opening,
    )


def _play_indexed(job: tuple) -> GameRecord:
    variant, prior, cfg, start_fen, record_search, opening = job
    return play_game(variant, prior, cfg, start_fen, record_search, opening)


def generate_set(
    variant: VariantConfig | VariantId | str,
    prior: PriorProvider,
    cfg: SearchConfig,
    count: int,
    opening_fens: Optional[Sequence[str]] = None,
    workers: int = 1,
    record_search: bool = False,
    opening_names: Optional[Sequence[str]] = None,
    progress: bool = True,
    on_record: Optional[Callable[[GameRecord], None]] = None,
) -> list[GameRecord]:
    """Play ``count`` games, game ``i`` seeded with ``game_seed(cfg.seed, i)``.

    Games cycle through ``opening_fens`` when given. Records come back in
    index order whatever the worker count; ``on_record`` sees each one in
    that order as soon as it is available.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not isinstance(variant, VariantConfig):
        variant = VariantConfig.of(variant)
    openings = list(opening_fens) if opening_fens else [None]
    names = list(opening_names) if opening_names else [None] * len(openings)
    for fen in openings:
        if fen is not None:
            _start_position(variant, fen)

    jobs = [
        (
            variant,
            prior,
            cfg.model_copy(update={"seed": game_seed(cfg.seed, i)}),
            openings[i % len(openings)],
            record_search,
            names[i % len(openings)],
        )
        for i in range(count)
    ]
    logger.info(
        "Generating %d %s game(s) with %d simulation(s) per move on %d worker(s)",
        count,
        variant.name,
        cfg.simulations,
        workers,
    )
    bar = tqdm(
        total=count, desc=f"selfplay {variant.name}", unit="game", disable=not progress
    )
    records: list[GameRecord] = []
    with bar:
        if workers <= 1:
            for job in jobs:
                record = _play_indexed(job)
                records.append(record)
                if on_record is not None:
                    on_record(record)
                bar.update(1)
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for record in pool.map(_play_indexed, jobs):
                    records.append(record)
                    if on_record is not None:
                        on_record(record)
                    bar.update(1)
    return records

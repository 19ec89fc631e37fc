"""
Experiment runs: one function per analysis, each writing its reports into a
run directory together with a ``manifest.json``.

The manifest records the command, the resolved configuration, the tool
version, a SHA-256 for every input file and the list of outputs, so a run can
be repeated from the manifest alone.
"""
import hashlib
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any, Optional

import numpy as np

from app import __version__
from app.core.exceptions import LabError, RecordIOError
from app.core.logging import get_logger
from app.engine.priors import PriorProvider
from app.engine.search import SearchConfig
from app.engine.selfplay import game_seed, generate_set
from app.notation.corpus import check_corpus_game, load_corpus
from app.notation.fen import parse_fen, serialize_fen
from app.notation.records import (
    read_game_records,
    replay_game,
    result_consistent,
    write_game_records,
)
from app.notation.reports import REPORT_SCHEMAS, write_csv_report, write_json_report
from app.rules.perft import divide, perft
from app.rules.position import initial_position
from app.schemas.game import GameRecord
from app.stats.candidates import additional_candidates
from app.stats.divergence import exact_kl_divergence, kl_divergence
from app.stats.diversity import diversity_curve, exact_diversity
from app.stats.lengths import LengthView, game_length_histogram
from app.stats.material import OptimizerConfig, PositionFilter, fit_piece_values
from app.stats.outcomes import (
    count_outcomes,
    draw_rate_comparison,
    empirical_expected_score,
    expected_score_comparison,
    posterior_summary,
)
from app.stats.trees import ChessTree
from app.stats.utilization import FEATURES, special_move_utilization

logger = get_logger(__name__)

OPENINGS_DIR = Path(__file__).resolve().parents[2] / "data" / "openings"
MANIFEST_NAME = "manifest.json"


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    try:
        with Path(path).open("rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as exc:
        raise RecordIOError(f"Cannot read '{path}': {exc}") from exc
    return digest.hexdigest()


class RunContext:
    """Output directory, inputs and outputs of one run."""

    def __init__(self, command: str, out_dir: str | Path, config: Mapping[str, Any]):
        self.command = command
        self.out_dir = Path(out_dir)
        self.config = dict(config)
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, Optional[str]] = {}

    def add_input(self, path: str | Path) -> Path:
        """Register an input file, or every regular file of an input directory."""
        path = Path(path)
        files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
        for item in files:
            self.inputs[str(item)] = sha256_file(item)
        return path

    def output(self, name: str, schema: Optional[str] = None) -> Path:
        self.outputs[name] = schema
        return self.out_dir / name

    def write_csv(self, name: str, schema: str, rows: Iterable[Mapping[str, Any]]) -> Path:
        return write_csv_report(self.output(name, schema), schema, rows)

    def write_json(self, name: str, payload: Mapping[str, Any]) -> Path:
        return write_json_report(self.output(name), payload)

    def manifest(self) -> dict[str, Any]:
        outputs = []
        for name, schema in sorted(self.outputs.items()):
            entry: dict[str, Any] = {"file": name}
            if schema is not None:
                entry["schema"] = schema
                entry["schema_version"] = REPORT_SCHEMAS[schema].version
            outputs.append(entry)
        return {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "inputs": [{"path": p, "sha256": h} for p, h in sorted(self.inputs.items())],
            "outputs": outputs,
        }

    def write_manifest(self) -> Path:
        path = write_json_report(self.out_dir / MANIFEST_NAME, self.manifest())
        logger.info(
            "Run '%s' wrote %d output(s) to %s",
            self.command,
            len(self.outputs),
            self.out_dir,
        )
        return path


def load_games(ctx: RunContext, paths: Sequence[str | Path]) -> list[GameRecord]:
    games: list[GameRecord] = []
    for path in paths:
        games.extend(read_game_records(ctx.add_input(path)))
    return games


def load_openings(ctx: RunContext, paths: Sequence[str | Path]) -> list[tuple[str, str]]:
    """Named FENs from opening files: one FEN per non-blank line, ``#`` comments.

    A bare name like ``dutch`` resolves to the shipped ``data/openings/dutch.fen``.
    """
    openings: list[tuple[str, str]] = []
    for raw in paths:
        path = Path(raw)
        if not path.exists() and (OPENINGS_DIR / f"{path.name}.fen").exists():
            path = OPENINGS_DIR / f"{path.name}.fen"
        ctx.add_input(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise RecordIOError(f"Cannot read '{path}': {exc}") from exc
        fens = [line.strip() for line in lines if line.strip() and not line.startswith("#")]
        if not fens:
            raise RecordIOError(f"'{path}' holds no FEN")
        for i, fen in enumerate(fens):
            openings.append((path.stem if len(fens) == 1 else f"{path.stem}-{i + 1}", fen))
    return openings


def _histogram_rows(view: str, counts: np.ndarray, edges: np.ndarray) -> list[dict]:
    return [
        {"view": view, "bin_lo": float(lo), "bin_hi": float(hi), "count": int(n)}
        for lo, hi, n in zip(edges[:-1], edges[1:], counts)
    ]


# ---------------------------------------------------------------------------
# Rules and game sets
# ---------------------------------------------------------------------------


def run_perft(
    ctx: RunContext,
    variant: str,
    depth: int,
    fen: Optional[str] = None,
    split: bool = False,
) -> int:
    position = parse_fen(fen, variant) if fen else initial_position(variant)
    text = serialize_fen(position)
    if split:
        counts = divide(position, depth)
        nodes = sum(counts.values())
        rows = [
            {"variant": variant, "fen": text, "depth": depth, "move": lan, "nodes": n}
            for lan, n in counts.items()
        ]
    else:
        nodes = perft(position, depth)
        rows = []
    rows.append({"variant": variant, "fen": text, "depth": depth, "move": "", "nodes": nodes})
    ctx.write_csv("perft.csv", "perft", rows)
    return nodes


def run_selfplay(
    ctx: RunContext,
    variant: str,
    prior: PriorProvider,
    cfg: SearchConfig,
    games: int,
    opening_paths: Sequence[str | Path] = (),
    workers: int = 1,
    record_search: bool = False,
    progress: bool = False,
) -> list[GameRecord]:
    """Generate a game set into ``games.jsonl``, one line per finished game."""
    openings = load_openings(ctx, opening_paths) if opening_paths else []
    path = ctx.output("games.jsonl")
    write_game_records(path, [], append=False)
    return generate_set(
        variant,
        prior,
        cfg,
        games,
        opening_fens=[fen for _, fen in openings] or None,
        workers=workers,
        record_search=record_search,
        opening_names=[name for name, _ in openings] or None,
        progress=progress,
        on_record=lambda record: write_game_records(path, [record]),
    )


def run_replay(ctx: RunContext, source: str | Path) -> int:
    """Validate a games file or a corpus directory; returns the failure count."""
    source = ctx.add_input(source)
    rows = []
    if source.is_dir():
        for game in load_corpus(source):
            check = check_corpus_game(game)
            rows.append(
                {
                    "game": check.id,
                    "variant": check.variant.value,
                    "plies": check.plies,
                    "legal": check.legal,
                    "illegal_ply": check.illegal_ply,
                    "final_state": check.final_state.value if check.final_state else None,
                    "final_reason": check.final_reason.value if check.final_reason else None,
                    "result_ok": check.result_ok and check.checkpoints_ok,
                    "error": check.error,
                }
            )
    else:
        for index, record in enumerate(read_game_records(source)):
            row: dict[str, Any] = {"game": index, "variant": record.variant.value}
            try:
                replay = replay_game(record)
            except LabError as exc:
                ply = getattr(exc, "ply", None)
                row.update(plies=(ply or 1) - 1, legal=False, illegal_ply=ply, result_ok=False)
                row["error"] = str(exc)
            else:
                row.update(
                    plies=len(replay.moves),
                    legal=True,
                    final_state=replay.status.state.value,
                    final_reason=replay.status.reason.value,
                    result_ok=result_consistent(record, replay),
                )
            rows.append(row)
    ctx.write_csv("replay.csv", "replay", rows)
    failures = sum(1 for row in rows if not (row["legal"] and row["result_ok"]))
    if failures:
        logger.warning("%d of %d game(s) failed validation", failures, len(rows))
    return failures


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------


def run_outcomes(
    ctx: RunContext,
    games_a: Sequence[str | Path],
    games_b: Sequence[str | Path],
    samples: int,
    seed: int,
) -> dict[str, float]:
    counts = {"a": count_outcomes(load_games(ctx, games_a))}
    counts["b"] = count_outcomes(load_games(ctx, games_b))
    summary_rows = []
    for name, tally in counts.items():
        post = posterior_summary(tally, samples, seed)
        row: dict[str, Any] = {
            "set": name,
            "n_win": tally.n_win,
            "n_draw": tally.n_draw,
            "n_lose": tally.n_lose,
            "n": tally.n,
            "empirical_score": empirical_expected_score(tally) if tally.n else None,
        }
        for key, interval in (
            ("win", post.win),
            ("draw", post.draw),
            ("lose", post.lose),
            ("score", post.score),
        ):
            row[f"mean_{key}"] = interval.mean
            row[f"{key}_lo"] = interval.low
            row[f"{key}_hi"] = interval.high
        summary_rows.append(row)
    ctx.write_csv("outcomes_summary.csv", "outcomes_summary", summary_rows)

    result = {
        "lower_draw_rate": draw_rate_comparison(counts["a"], counts["b"], samples, seed),
        "higher_expected_score": expected_score_comparison(
            counts["a"], counts["b"], samples, seed
        ),
    }
    ctx.write_csv(
        "outcomes_comparison.csv",
        "outcomes_comparison",
        [
            {"statistic": name, "a": "a", "b": "b", "probability": value,
             "samples": samples, "seed": seed}
            for name, value in result.items()
        ],
    )
    return result


# ---------------------------------------------------------------------------
# Opening trees
# ---------------------------------------------------------------------------


def run_diversity(
    ctx: RunContext,
    variant: str,
    prior: PriorProvider,
    plies: int,
    samples: int,
    seed: int,
    start_fen: Optional[str] = None,
    exact: bool = False,
    bins: int = 20,
    progress: bool = False,
) -> None:
    tree = ChessTree(prior, variant, start_fen)
    if exact:
        curve = exact_diversity(tree, plies)
    else:
        curve = diversity_curve(tree, plies, samples, seed, progress)
    ctx.write_csv(
        "diversity.csv",
        "diversity",
        [
            {
                "ply": row.ply,
                "samples": row.samples,
                "entropy": row.entropy,
                "entropy_se": row.entropy_se,
                "equivalent_sequences": row.equivalent_sequences,
                "candidates": row.candidates,
                "candidates_se": row.candidates_se,
                "iida_ratio": row.iida_ratio,
            }
            for row in curve.plies
        ],
    )
    if curve.final_surprisals.size:
        counts, edges = curve.surprisal_histogram(bins)
        rows = _histogram_rows("surprisal", counts, edges)
        ctx.write_csv("surprisal_histogram.csv", "histogram", rows)


def run_kl(
    ctx: RunContext,
    variant_p: str,
    variant_q: str,
    prior_p: PriorProvider,
    prior_q: PriorProvider,
    plies: int,
    samples: int,
    seed: int,
    start_fen: Optional[str] = None,
    exact: bool = False,
    bins: int = 20,
    progress: bool = False,
) -> float:
    p_tree = ChessTree(prior_p, variant_p, start_fen)
    q_tree = ChessTree(prior_q, variant_q, start_fen)
    if exact:
        estimate = exact_kl_divergence(p_tree, q_tree, plies)
    else:
        estimate = kl_divergence(p_tree, q_tree, plies, samples, seed, progress)
    ctx.write_csv(
        "kl.csv",
        "kl",
        [
            {
                "variant_p": variant_p,
                "variant_q": variant_q,
                "plies": plies,
                "samples": estimate.sample_count,
                "mode": "exact" if estimate.exact else "monte_carlo",
                "nats": estimate.nats,
                "stderr": estimate.standard_error,
            }
        ],
    )
    if estimate.log_ratios.size:
        counts, edges = estimate.log_ratio_histogram(bins)
        rows = _histogram_rows("log_ratio", counts, edges)
        ctx.write_csv("kl_log_ratio_histogram.csv", "histogram", rows)
    return estimate.nats


def run_candidates(
    ctx: RunContext,
    variant_p: str,
    variant_q: str,
    prior_p: PriorProvider,
    prior_q: PriorProvider,
    plies: int,
    samples: int,
    seed: int,
    start_fen: Optional[str] = None,
    progress: bool = False,
) -> int:
    """Additional-candidates curve; returns the number of bound violations."""
    curve = additional_candidates(
        ChessTree(prior_p, variant_p, start_fen),
        ChessTree(prior_q, variant_q, start_fen),
        plies,
        samples,
        seed,
        progress,
    )
    ctx.write_csv(
        "candidates.csv",
        "candidates",
        [
            {
                "ply": row.ply,
                "samples": row.samples,
                "additional": row.additional,
                "additional_se": row.additional_se,
                "m_p": row.m_p,
                "m_q": row.m_q,
                "m_r": row.m_r,
                "bound_violations": row.bound_violations,
                "min_slack": row.min_slack,
                "max_slack": row.max_slack,
            }
            for row in curve.plies
        ],
    )
    return curve.bound_violations


# ---------------------------------------------------------------------------
# Game-set analyses
# ---------------------------------------------------------------------------


def run_piece_values(
    ctx: RunContext,
    games: Sequence[str | Path],
    start_ply: int = 20,
    mode: str = "all",
    seed: int = 0,
    max_iterations: int = 10_000,
    progress: bool = False,
) -> dict[str, float]:
    model = fit_piece_values(
        load_games(ctx, games),
        PositionFilter(start_ply=start_ply, mode=mode, seed=seed),
        OptimizerConfig(max_iterations=max_iterations),
        progress,
    )
    ctx.write_csv(
        "piece_values.csv",
        "piece_values",
        [
            {
                "parameter": name,
                "weight": float(model.weights[i]),
                "normalized": model.normalized.get(name),
            }
            for i, name in enumerate(("bias", *model.normalized))
        ],
    )
    ctx.write_json(
        "piece_values.json",
        {
            "mode": model.mode,
            "start_ply": model.start_ply,
            "positions": model.positions,
            "iterations": model.iterations,
            "final_loss": model.final_loss,
            "gradient_norm": model.gradient_norm,
            "weights": [float(w) for w in model.weights],
            "normalized": model.normalized,
        },
    )
    return model.normalized


def run_utilization(
    ctx: RunContext, games: Sequence[str | Path], progress: bool = False
) -> dict[str, Any]:
    by_variant: dict[str, list[GameRecord]] = defaultdict(list)
    for record in load_games(ctx, games):
        by_variant[record.variant.value].append(record)
    rows = []
    summary: dict[str, Any] = {}
    for variant, records in sorted(by_variant.items()):
        report = special_move_utilization(records, progress)
        for feature in FEATURES:
            usage = report.features[feature]
            rows.append(
                {
                    "variant": variant,
                    "feature": feature,
                    "games_with": usage.games_with,
                    "game_fraction": report.game_fraction(feature),
                    "moves": usage.moves,
                    "move_fraction": report.move_fraction(feature),
                    "n_games": report.n_games,
                    "n_moves": report.n_moves,
                }
            )
        summary[variant] = {
            "n_games": report.n_games,
            "n_moves": report.n_moves,
            "decisive_games": report.decisive_games,
            "decisive_by_stalemate": report.decisive_by_stalemate,
            "stalemate_fraction": report.stalemate_fraction,
        }
    ctx.write_csv("utilization.csv", "utilization", rows)
    ctx.write_json("utilization.json", summary)
    return summary


def run_lengths(
    ctx: RunContext, games: Sequence[str | Path], bucket_width: int = 10
) -> dict[str, Any]:
    histogram = game_length_histogram(load_games(ctx, games), bucket_width)
    views: dict[str, LengthView] = {"all": histogram.all_games, "decisive": histogram.decisive}
    rows = [
        {"view": name, "bucket_lo": lo, "bucket_hi": lo + bucket_width, "count": count}
        for name, view in views.items()
        for lo, count in view.buckets.items()
    ]
    ctx.write_csv("lengths.csv", "lengths", rows)
    summary = {
        name: {"count": view.count, "mean": view.mean, "median": view.median}
        for name, view in views.items()
    }
    ctx.write_json("lengths.json", {"bucket_width": bucket_width, **summary})
    return summary


def run_opening_eval(
    ctx: RunContext,
    variant: str,
    prior: PriorProvider,
    cfg: SearchConfig,
    opening_paths: Sequence[str | Path],
    games: int,
    samples: int,
    workers: int = 1,
    progress: bool = False,
) -> list[dict[str, Any]]:
    """Play ``games`` games from each opening and tally White's results."""
    openings = load_openings(ctx, opening_paths)
    path = ctx.output("games.jsonl")
    write_game_records(path, [], append=False)
    rows = []
    for index, (name, fen) in enumerate(openings):
        records = generate_set(
            variant,
            prior,
            cfg.model_copy(update={"seed": game_seed(cfg.seed, index)}),
            games,
            opening_fens=[fen],
            workers=workers,
            opening_names=[name],
            progress=progress,
            on_record=lambda record: write_game_records(path, [record]),
        )
        tally = count_outcomes(records)
        post = posterior_summary(tally, samples, cfg.seed)
        rows.append(
            {
                "opening": name,
                "variant": variant,
                "games": tally.n,
                "wins": tally.n_win,
                "draws": tally.n_draw,
                "losses": tally.n_lose,
                "expected_score": empirical_expected_score(tally),
                "score_lo": post.score.low,
                "score_hi": post.score.high,
            }
        )
        logger.info("Opening %s: %d/%d/%d", name, tally.n_win, tally.n_draw, tally.n_lose)
    ctx.write_csv("opening_eval.csv", "opening_eval", rows)
    return rows

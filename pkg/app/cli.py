"""Command line front door: ``variantlab <subcommand> [flags]``.

Exit codes: 0 on success, 1 on a usage error, 2 on a data error.
"""
import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn, Optional

from app.config import settings
from app.core.exceptions import LabError
from app.core.logging import get_logger, setup_logging
from app.engine.priors import PRIORS, prior_from_name
from app.engine.search import SearchConfig
from app.rules.types import VariantId
from app.services import experiments
from app.services.experiments import RunContext

logger = get_logger(__name__)

VARIANTS = [v.value for v in VariantId]
DEFAULT_OPENINGS = ("dutch", "chigorin", "alekhine", "kings_gambit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")

    def parse_known_args(  # type: ignore[override]
        self, args: Optional[Sequence[str]] = None, namespace: Any = None
    ) -> tuple[argparse.Namespace, list[str]]:
        parsed, extras = super().parse_known_args(args, namespace)
        # Evaluation sets search without root noise unless asked for it.
        if getattr(parsed, "noise_weight", 0.0) is None:
            parsed.noise_weight = (
                settings.eval_root_noise_weight
                if parsed.evaluation
                else settings.root_noise_weight
            )
        return parsed, extras


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return number


def _non_negative(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return number


def _common_flags() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument(
        "--output-dir",
        type=Path,
        default=Path(settings.output_dir),
        help="Directory for reports and manifest.json (env VARIANTLAB_OUTPUT_DIR)",
    )
    parent.add_argument("--seed", type=_non_negative, default=settings.seed, help="Base seed")
    parent.add_argument("--quiet", action="store_true", help="No progress bars")
    parent.add_argument("--log-level", default=settings.log_level, help="Logging level")
    return parent


def _search_flags() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--variant", choices=VARIANTS, default="classical")
    parent.add_argument("--prior", choices=sorted(PRIORS), default="uniform")
    parent.add_argument("--simulations", type=_positive, default=settings.simulations)
    parent.add_argument("--c-puct", type=float, default=settings.c_puct)
    parent.add_argument("--noise-alpha", type=float, default=settings.root_noise_alpha)
    parent.add_argument(
        "--noise-weight",
        type=float,
        default=None,
        help="Root Dirichlet noise weight (default: off for evaluation sets)",
    )
    parent.add_argument(
        "--softmax-plies",
        type=_non_negative,
        default=settings.softmax_plies,
        help="Plies sampled in proportion to visit counts before greedy play",
    )
    parent.add_argument("--max-plies", type=_positive, default=settings.max_game_plies)
    parent.add_argument(
        "--workers",
        "--threads",
        dest="workers",
        type=_positive,
        default=settings.workers,
        help="Worker processes (not threads) for game generation; --threads is an alias",
    )
    return parent


def _tree_flags(pair: bool) -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    if pair:
        parent.add_argument("--variant-p", choices=VARIANTS, default="classical")
        parent.add_argument("--variant-q", choices=VARIANTS, required=True)
        parent.add_argument("--prior-p", choices=sorted(PRIORS), default="uniform")
        parent.add_argument("--prior-q", choices=sorted(PRIORS), default="uniform")
    else:
        parent.add_argument("--variant", choices=VARIANTS, default="classical")
        parent.add_argument("--prior", choices=sorted(PRIORS), default="uniform")
    parent.add_argument("--plies", type=_positive, default=10, help="Horizon T")
    parent.add_argument("--samples", type=_positive, default=settings.sequence_samples)
    parent.add_argument("--start-fen", default=None, help="Root position (default: start)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="variantlab", description="Chess variant laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    search = _search_flags()

    p = sub.add_parser("perft", parents=[common], help="Count leaf nodes to a depth")
    p.add_argument("--variant", choices=VARIANTS, default="classical")
    p.add_argument("--depth", type=_non_negative, required=True)
    p.add_argument("--fen", default=None)
    p.add_argument("--divide", action="store_true", help="Per-root-move counts")
    p.set_defaults(handler=_perft)

    p = sub.add_parser("selfplay", parents=[common, search], help="Generate a game set")
    p.add_argument("--games", type=_positive, required=True)
    p.add_argument("--fens", nargs="+", default=[], help="Opening FEN files to cycle through")
    p.add_argument("--record-search", action="store_true", help="Store root visit counts")
    p.add_argument(
        "--evaluation",
        action="store_true",
        help="Evaluation set: root noise defaults to VARIANTLAB_EVAL_ROOT_NOISE_WEIGHT",
    )
    p.set_defaults(handler=_selfplay)

    p = sub.add_parser("replay", parents=[common], help="Validate a games file or corpus")
    p.add_argument("source", type=Path, help="games.jsonl or a corpus directory")
    p.set_defaults(handler=_replay)

    p = sub.add_parser("outcomes", parents=[common], help="Compare two game sets")
    p.add_argument("--games-a", type=Path, nargs="+", required=True)
    p.add_argument("--games-b", type=Path, nargs="+", required=True)
    p.add_argument("--samples", type=_positive, default=settings.posterior_samples)
    p.set_defaults(handler=_outcomes)

    p = sub.add_parser(
        "diversity", parents=[common, _tree_flags(False)], help="Opening entropy"
    )
    p.add_argument("--exact", action="store_true", help="Enumerate instead of sampling")
    p.add_argument("--bins", type=_positive, default=20)
    p.set_defaults(handler=_diversity)

    p = sub.add_parser("kl", parents=[common, _tree_flags(True)], help="KL divergence p || q")
    p.add_argument("--exact", action="store_true", help="Enumerate instead of sampling")
    p.add_argument("--bins", type=_positive, default=20)
    p.set_defaults(handler=_kl)

    p = sub.add_parser(
        "candidates", parents=[common, _tree_flags(True)], help="Additional candidate moves"
    )
    p.set_defaults(handler=_candidates)

    p = sub.add_parser("piece-values", parents=[common], help="Fit piece values")
    p.add_argument("games", type=Path, nargs="+")
    p.add_argument("--start-ply", type=_non_negative, default=20)
    p.add_argument("--mode", choices=["all", "one-per-game"], default="all")
    p.add_argument("--max-iterations", type=_positive, default=10_000)
    p.set_defaults(handler=_piece_values)

    p = sub.add_parser("utilization", parents=[common], help="Special-move usage")
    p.add_argument("games", type=Path, nargs="+")
    p.set_defaults(handler=_utilization)

    p = sub.add_parser("lengths", parents=[common], help="Game length histograms")
    p.add_argument("games", type=Path, nargs="+")
    p.add_argument("--bucket-width", type=_positive, default=10)
    p.set_defaults(handler=_lengths)

    p = sub.add_parser(
        "opening-eval", parents=[common, search], help="Fixed-opening game sets"
    )
    p.add_argument("--fens", nargs="+", default=list(DEFAULT_OPENINGS))
    p.add_argument("--games", type=_positive, required=True, help="Games per opening")
    p.add_argument("--samples", type=_positive, default=settings.posterior_samples)
    p.set_defaults(handler=_opening_eval, evaluation=True)
    return parser


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def _search_config(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        simulations=args.simulations,
        c_puct=args.c_puct,
        root_noise_alpha=args.noise_alpha,
        root_noise_weight=args.noise_weight,
        softmax_plies=args.softmax_plies,
        max_game_plies=args.max_plies,
        seed=args.seed,
    )


def _perft(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    nodes = experiments.run_perft(ctx, args.variant, args.depth, args.fen, args.divide)
    print(nodes)
    return 0


def _selfplay(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_selfplay(
        ctx,
        args.variant,
        prior_from_name(args.prior),
        _search_config(args),
        args.games,
        args.fens,
        args.workers,
        args.record_search,
        progress,
    )
    return 0


def _replay(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    failures = experiments.run_replay(ctx, args.source)
    return LabError.exit_code if failures else 0


def _outcomes(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    result = experiments.run_outcomes(ctx, args.games_a, args.games_b, args.samples, args.seed)
    for name, value in result.items():
        print(f"{name}\t{value:.6f}")
    return 0


def _diversity(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_diversity(
        ctx,
        args.variant,
        prior_from_name(args.prior),
        args.plies,
        args.samples,
        args.seed,
        args.start_fen,
        args.exact,
        args.bins,
        progress,
    )
    return 0


def _kl(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    nats = experiments.run_kl(
        ctx,
        args.variant_p,
        args.variant_q,
        prior_from_name(args.prior_p),
        prior_from_name(args.prior_q),
        args.plies,
        args.samples,
        args.seed,
        args.start_fen,
        args.exact,
        args.bins,
        progress,
    )
    print(f"{nats:.6f}")
    return 0


def _candidates(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_candidates(
        ctx,
        args.variant_p,
        args.variant_q,
        prior_from_name(args.prior_p),
        prior_from_name(args.prior_q),
        args.plies,
        args.samples,
        args.seed,
        args.start_fen,
        progress,
    )
    return 0


def _piece_values(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    normalized = experiments.run_piece_values(
        ctx, args.games, args.start_ply, args.mode, args.seed, args.max_iterations, progress
    )
    for name, value in normalized.items():
        print(f"{name}\t{value:.3f}")
    return 0


def _utilization(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_utilization(ctx, args.games, progress)
    return 0


def _lengths(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_lengths(ctx, args.games, args.bucket_width)
    return 0


def _opening_eval(ctx: RunContext, args: argparse.Namespace, progress: bool) -> int:
    experiments.run_opening_eval(
        ctx,
        args.variant,
        prior_from_name(args.prior),
        _search_config(args),
        args.fens,
        args.games,
        args.samples,
        args.workers,
        progress,
    )
    return 0


Handler = Callable[[RunContext, argparse.Namespace, bool], int]


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def _resolved_config(args: argparse.Namespace) -> dict[str, Any]:
    return {k: _jsonable(v) for k, v in vars(args).items() if k != "handler"}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)

    setup_logging(args.log_level)
    progress = not args.quiet and sys.stderr.isatty()
    ctx = RunContext(args.command, args.output_dir, _resolved_config(args))
    handler: Handler = args.handler
    try:
        code = handler(ctx, args, progress)
    except LabError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"variantlab {args.command}: {exc}", file=sys.stderr)
        code = exc.exit_code
    except ValueError as exc:
        print(f"variantlab {args.command}: {exc}", file=sys.stderr)
        return 1

    try:
        ctx.write_manifest()
    except LabError as exc:
        print(f"variantlab {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

import logging
import sys

from tqdm import tqdm

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(process)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ProgressAwareHandler(logging.StreamHandler):
    """Stderr handler that prints above active tqdm bars instead of through them."""

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record), file=self.stream)
        except Exception:  # pylint: disable=broad-except
            self.handleError(record)


def setup_logging(level: str = "INFO") -> None:
    """Configure the root logger on stderr.

    Answers and report files go to stdout or disk; diagnostics never do.
    Worker processes of a self-play pool inherit this setup, hence the pid
    in the format.
    """
    handler = ProgressAwareHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        handlers=[handler],
        force=True,
    )

    for noisy in ("httpx", "httpcore", "asyncio", "uvicorn.access"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)

"""Chess variant laboratory: rules, self-play and statistics."""

__version__ = "0.1.0"

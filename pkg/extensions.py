import logging
import sys

# package logger; module loggers are named "packlab.<module>" so they inherit its handler
logger = logging.getLogger("packlab")

_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str | int = "INFO") -> logging.Logger:
    """Attach one stderr handler to the package logger (idempotent)."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    handler = next((h for h in logger.handlers if getattr(h, "_packlab", False)), None)
    if handler is None:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._packlab = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    else:
        # stderr may have been swapped since the first call
        handler.setStream(sys.stderr)

    logger.setLevel(level)
    logger.propagate = False
    return logger

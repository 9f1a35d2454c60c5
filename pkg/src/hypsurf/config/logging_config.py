"""Logger factory shared by every hypsurf module.

Each module calls ``configure_logging(__name__)`` once at import. All loggers
share one rotating ``logs/hypsurf.log`` next to ``pyproject.toml``. Console
records go to stderr through ``tqdm.write`` so they do not tear the progress
bars of long Monte-Carlo or census runs; CSV on stdout stays clean.
"""

import logging
import logging.handlers
import sys
from pathlib import Path

import colorlog
from tqdm import tqdm

LOG_FILE_NAME = "hypsurf.log"
LOG_FORMAT = "%(asctime)s|%(name)s|%(levelname)s|%(funcName)s:%(lineno)d > %(message)s"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}

_file_handler: logging.Handler | None = None


class TqdmStreamHandler(logging.StreamHandler):
    """Console handler that prints above any active tqdm bar."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record), file=self.stream)
        except Exception:
            self.handleError(record)


def project_root(start: Path = Path(__file__)) -> Path:
    """Nearest ancestor holding ``pyproject.toml``, else the current directory."""
    for parent in start.resolve().parents:
        if (parent / "pyproject.toml").exists():
            return parent
    return Path.cwd()


def resolve_log_level() -> int:
    """``HYPSURF_LOG_LEVEL`` / ``[app] log_level`` as a ``logging`` constant."""
    try:
        from hypsurf.config.settings_service import SettingsService

        name = SettingsService().log_level
    except (FileNotFoundError, KeyError):
        return logging.INFO
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log_level in settings: {name!r}")
    return level


def _shared_file_handler(level: int) -> logging.Handler:
    global _file_handler
    if _file_handler is None:
        log_dir = project_root() / "logs"
        log_dir.mkdir(parents=True, exist_ok=True)
        _file_handler = logging.handlers.RotatingFileHandler(
            log_dir / LOG_FILE_NAME, maxBytes=1_048_576, backupCount=5
        )
        _file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    _file_handler.setLevel(level)
    return _file_handler


def configure_logging(name: str, level: int | None = None, use_colors: bool = True) -> logging.Logger:
    """Return the logger ``name`` wired to the shared log file and the console.

    Calling it again for the same name replaces the handlers, so the level can
    be changed after the settings are reloaded.
    """
    level = resolve_log_level() if level is None else level
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers.clear()

    logger.addHandler(_shared_file_handler(level))

    console = TqdmStreamHandler(sys.stderr)
    if use_colors and sys.stderr.isatty():
        console.setFormatter(colorlog.ColoredFormatter("%(log_color)s" + LOG_FORMAT, log_colors=LOG_COLORS))
    else:
        console.setFormatter(logging.Formatter(LOG_FORMAT))
    console.setLevel(level)
    logger.addHandler(console)
    return logger

import logging
import sys
from pathlib import Path

PACKAGE_PATH = Path(__file__).parent.parent.absolute()

# Parent of every module logger; result tables own stdout, diagnostics go to stderr.
LOGGER_NAMESPACE: str = "hardy_moser"

# Every logger handed out by `create_logger`, so verbosity flags reach all of them.
_LAB_LOGGERS: set[str] = set()


def create_logger(
    name: str = "lab",
    log_level: int = logging.INFO,
    log_file: str | None = None,
) -> logging.Logger:
    """
    Logger ``hardy_moser.<name>`` for one module of the lab.

    Missed tolerances are warnings and per-step diagnostics are DEBUG, so
    ``--quiet`` keeps only the misses.

    Parameters:
    -----------
    name : str, optional
        Module name appended to the lab namespace, by default 'lab'
    log_level : int, optional
        Initial level until `set_log_level` is called, by default logging.INFO
    log_file : str, optional
        Also append records to this file, by default None

    Returns:
    --------
    logging.Logger
        The namespaced logger, registered for `set_log_level`
    """
    full_name = f"{LOGGER_NAMESPACE}.{name}"
    logger = logging.getLogger(full_name)
    logger.setLevel(log_level)
    logger.propagate = False

    # Re-importing a module must not duplicate its records.
    logger.handlers.clear()

    formatter = logging.Formatter(
        fmt="%(asctime)s %(name)s [%(levelname)s] %(message)s",
        datefmt="%H:%M:%S",
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    _LAB_LOGGERS.add(full_name)
    return logger


def set_log_level(log_level: int) -> None:
    """Apply ``log_level`` to every logger created through `create_logger`."""
    for name in _LAB_LOGGERS:
        logger = logging.getLogger(name)
        logger.setLevel(log_level)
        for handler in logger.handlers:
            handler.setLevel(log_level)


__all__: list[str] = ["LOGGER_NAMESPACE", "PACKAGE_PATH", "create_logger", "set_log_level"]

import logging
import os
import sys
from PyQt6.QtCore import QObject, pyqtSignal

LOGGER_NAME = "twosat-lp"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class SignalHandler(logging.Handler):
    """Forwards formatted records to a (message, level name) Qt signal."""

    def __init__(self, signal, level=logging.INFO):
        super().__init__(level)
        self.signal = signal

    def emit(self, record):
        try:
            self.signal.emit(self.format(record), record.levelname)
        except RuntimeError:
            # receiver already deleted
            pass


def stream_level(settings_manager, verbose):
    if settings_manager.get("debug_mode"):
        return logging.DEBUG
    return logging.INFO if verbose else logging.WARNING


class Logger(QObject):
    """
    Shared logger for the solver, oracles and command line.

    Records go to app.log in the config directory (everything), to stderr
    (warnings and up unless verbose or debug_mode) and to log_signal, which
    bench workers and tests observe.
    """

    log_signal = pyqtSignal(str, str)

    def __init__(self, settings_manager, verbose=False, log_to_file=True):
        super().__init__()
        self.settings_manager = settings_manager
        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        for old in list(self.logger.handlers):
            old.close()
            self.logger.removeHandler(old)

        formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
        debug = bool(settings_manager.get("debug_mode"))

        handlers = []
        if log_to_file:
            path = os.path.join(settings_manager.config_dir, "app.log")
            handlers.append(logging.FileHandler(path, mode="a", encoding="utf-8"))
        # stdout carries verdicts and CSV, so console logging uses stderr
        console = logging.StreamHandler(sys.stderr)
        console.setLevel(stream_level(settings_manager, verbose))
        handlers.append(console)
        handlers.append(SignalHandler(self.log_signal, logging.DEBUG if debug else logging.INFO))

        for handler in handlers:
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)

    def log(self, level, message):
        self.logger.log(level, message)

    def debug(self, message):
        self.log(logging.DEBUG, message)

    def info(self, message):
        self.log(logging.INFO, message)

    def warning(self, message):
        self.log(logging.WARNING, message)

    def error(self, message):
        self.log(logging.ERROR, message)

    def critical(self, message):
        self.log(logging.CRITICAL, message)


# Set by initialize_logger(); library modules call get_logger()
LOGGER = None


def initialize_logger(settings_manager, verbose=False, log_to_file=True):
    global LOGGER
    if LOGGER is None:
        LOGGER = Logger(settings_manager, verbose=verbose, log_to_file=log_to_file)
    return LOGGER


def get_logger():
    """The shared Logger, or the plain stdlib logger before initialization."""
    return LOGGER if LOGGER is not None else logging.getLogger(LOGGER_NAME)

"""
Logging Utility

This module provides centralized logging configuration for the MSQKD simulator.
"""

import logging
import sys
from typing import Optional
from datetime import datetime


class MSQKDLogFormatter(logging.Formatter):
    """Custom log formatter for the simulator"""

    def format(self, record):
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
        record.timestamp = timestamp
        record.system = "MSQKD"

        if hasattr(record, 'component'):
            return f"[{record.timestamp}] {record.system} [{record.component}] {record.levelname}: {record.getMessage()}"
        else:
            return f"[{record.timestamp}] {record.system} {record.levelname}: {record.getMessage()}"


class ComponentFilter(logging.Filter):
    """Stamps every record of a logger with its component identifier"""

    def __init__(self, component: str):
        super().__init__()
        self.component = component

    def filter(self, record):
        if not hasattr(record, 'component'):
            record.component = self.component
        return True


def get_logger(name: str, component: Optional[str] = None, level: str = "INFO") -> logging.Logger:
    """
    Get a configured logger for the simulator

    Args:
        name: Logger name (usually __name__)
        component: Optional component identifier shown in every line
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if component and not any(isinstance(f, ComponentFilter) for f in logger.filters):
        logger.addFilter(ComponentFilter(component))

    # Avoid adding multiple handlers
    if logger.handlers:
        return logger

    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(numeric_level)

    # Diagnostics go to stderr so that stdout stays machine-readable
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(MSQKDLogFormatter())
    logger.addHandler(console_handler)

    logger.propagate = False

    return logger


def setup_system_logging(level: str = "INFO"):
    """
    Setup system-wide logging configuration

    Args:
        level: Logging level applied to the root logger and every simulator logger
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(MSQKDLogFormatter())
    root_logger.addHandler(console_handler)

    # Module loggers created by get_logger keep their own handlers
    for name, existing in logging.Logger.manager.loggerDict.items():
        if isinstance(existing, logging.Logger) and existing.handlers:
            existing.setLevel(numeric_level)
            for handler in existing.handlers:
                handler.setLevel(numeric_level)

    logging.getLogger("numexpr").setLevel(logging.WARNING)
    logging.getLogger("hypothesis").setLevel(logging.WARNING)


class SimulationLogger:
    """
    Component logger with structured helpers for runs and verification
    """

    def __init__(self, component: str, kind: str = "command"):
        """
        Initialize simulation logger

        Args:
            component: Component identifier (command or strategy name)
            kind: Kind of component (command, runner, analysis)
        """
        self.component = component
        self.kind = kind
        self.logger = get_logger(f"msqkd.{kind}.{component}", component)

    def debug(self, message: str, **kwargs):
        self.logger.debug(f"{message}", extra=kwargs)

    def info(self, message: str, **kwargs):
        self.logger.info(f"{message}", extra=kwargs)

    def warning(self, message: str, **kwargs):
        self.logger.warning(f"{message}", extra=kwargs)

    def error(self, message: str, **kwargs):
        self.logger.error(f"{message}", extra=kwargs)

    def log_run_start(self, strategy: str, rounds: int, seed: int):
        """Log run start"""
        self.info(f"Run started: {strategy} ({rounds} rounds, seed {seed})",
                  strategy=strategy, rounds=rounds, seed=seed)

    def log_run_complete(self, strategy: str, duration: float, key_length: int):
        """Log run completion"""
        self.info(f"Run completed: {strategy} (duration: {duration:.2f}s, raw key {key_length} bits)",
                  strategy=strategy, duration=duration, key_length=key_length)

    def log_abort(self, reason: str, error_rates):
        """Log a protocol abort"""
        rates = ", ".join(f"{r:.4f}" for r in error_rates)
        self.warning(f"Protocol aborted: {reason} (error rates: {rates})",
                     reason=reason)

    def log_verification_row(self, name: str, expected: float, observed: float, passed: bool):
        """Log one verification comparison"""
        status = "pass" if passed else "FAIL"
        self.info(f"Verify {name}: expected {expected:.12g}, observed {observed:.12g} - {status}",
                  check=name, passed=passed)

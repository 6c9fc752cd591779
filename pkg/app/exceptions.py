"""
Error types raised by the forecasting services.
"""
from typing import Optional


class ForecastError(Exception):
    """Base class for every error the forecaster raises on bad input."""


class ConfigError(ForecastError):
    """Invalid or unknown configuration key."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class CityDataError(ForecastError):
    """
    City database could not be loaded.

    `issues` holds (line, message) pairs so every bad row is reported at once.
    Line numbers count the header as line 1.
    """

    def __init__(self, message: str, issues: Optional[list[tuple[int, str]]] = None):
        self.issues = issues or []
        if self.issues:
            details = "; ".join(f"{msg}, line {line}" for line, msg in self.issues)
            message = f"{message}: {details}"
        super().__init__(message)


class GeometryError(ForecastError, ValueError):
    """Invalid city geometry or vertiport network input."""


class ScenarioError(ForecastError, ValueError):
    """Scenario name or year outside the supported domain."""

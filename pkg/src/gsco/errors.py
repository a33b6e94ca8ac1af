"""Exception types shared across the toolkit.

The CLI maps these onto process exit codes: ConfigError (and subclasses)
exit with 2, NumericError with 3, EnumerationCapError with 4.
"""

__all__ = [
    "GscoError",
    "ConfigError",
    "EdgeListParseError",
    "RangeError",
    "GenerationError",
    "NumericError",
    "EnumerationCapError",
    "DegenerateDirectionError",
]


class GscoError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GscoError):
    """Invalid configuration value, option combination, or input description."""


class EdgeListParseError(ConfigError):
    """Malformed edge-list text; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class RangeError(ConfigError):
    """Node or index outside the valid [0, d) range."""


class GenerationError(ConfigError):
    """Instance generation asked for something the model cannot provide."""


class NumericError(GscoError):
    """Non-finite value or a numeric routine that failed to converge."""


class EnumerationCapError(GscoError):
    """Support enumeration refused because the dimension exceeds the safety cap."""


class DegenerateDirectionError(GscoError):
    """Zero captured norm: the normalized oracle direction is undefined."""

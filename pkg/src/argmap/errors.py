"""Exception types shared across the toolkit."""


class ArgmapError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ArgmapError):
    """A record or file could not be parsed; the message names the location."""


class IntegrityError(ArgmapError):
    """Input data violates a structural invariant (dangling reference, cycle, duplicate)."""


class StateError(ArgmapError):
    """An operation was invoked against an object in the wrong state."""


class NotFoundError(ArgmapError):
    """A referenced entity (level, topic, file) does not exist."""


class DegenerateLabelError(ArgmapError):
    """Label normalization produced an empty string; the caller decides whether to keep the raw label."""


class ConfigError(ArgmapError):
    """Inconsistent configuration, e.g. mismatched embedding dimensions or a stale index cache."""


class MetricUndefinedError(ArgmapError):
    """A metric has no defined value for the given inputs (empty pool, no pairable judgments)."""

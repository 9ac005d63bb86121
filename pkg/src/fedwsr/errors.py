"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, NumericError -> 4.
"""


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration."""


class DataError(Exception):
    """Malformed dataset file or dataset/config mismatch."""


class NumericError(Exception):
    """Non-finite value detected during training or evaluation."""


class ShapeError(ValueError):
    """Array shape incompatible with a layer or operation contract."""

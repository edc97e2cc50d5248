class ConfigError(ValueError):
    """Invalid experiment parameters. ``fields`` names the offending keys."""

    def __init__(self, message: str, fields: tuple[str, ...] = ()):
        super().__init__(message)
        self.fields = fields


class ConsistencyError(RuntimeError):
    """Two evaluation paths that must agree did not. Always a bug, never user error."""

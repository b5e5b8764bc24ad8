"""Exception types shared across the package."""


class ConditionViolation(ValueError):
    """A standing structural assumption failed on concrete matrices.

    Parameters
    ----------
    condition : str
        Short name of the violated condition, e.g. ``"gap"`` or ``"decay"``.
    message : str
        Human readable diagnostic.
    value : float, optional
        The measured quantity that triggered the failure.
    """

    def __init__(self, condition: str, message: str, value: float | None = None):
        super().__init__(f"[{condition}] {message}")
        self.condition = condition
        self.value = value


class ConfigError(ValueError):
    """Malformed run configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line

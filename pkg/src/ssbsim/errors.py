"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An operation was called with arguments outside its contract."""


class EmptyEnsembleError(ValueError):
    """No states were left to average into an ensemble."""


class DegenerateConditioningError(ValueError):
    """Conditioning on an outcome that has zero probability."""


class IncompleteDataError(ValueError):
    """Tomography data does not cover every required Pauli string.

    Attributes
    ----------
    missing : list of str
        Pauli strings (e.g. ``"YY"``) absent from the data.
    """

    def __init__(self, missing, message=None):
        self.missing = sorted(missing)
        if message is None:
            message = "missing Pauli strings: " + ", ".join(self.missing)
        super().__init__(message)


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending setting."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class CountsFormatError(ValueError):
    """Malformed counts table; ``line`` is 1-based, or None for whole-table errors."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)

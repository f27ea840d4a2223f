"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for model construction and checking failures."""


class CapExceeded(ModelError):
    def __init__(self, states: int, transitions: int, limit: str):
        self.states = states
        self.transitions = transitions
        self.limit = limit
        super().__init__(
            f"{limit} cap exceeded after {states} states / {transitions} transitions"
        )


class NonTotal(ModelError):
    def __init__(self, snapshot):
        self.snapshot = snapshot
        shown = ", ".join(f"{k}={v}" for k, v in snapshot)
        super().__init__(f"state has no successors: {shown}")


class DuplicateAtom(ModelError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"atom registered twice: {name!r}")


class UnknownAtom(ModelError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"atom not labeled in structure: {name!r}")


class ResultMismatch(ModelError):
    """A CheckResult was passed alongside a structure or spec it was not computed from."""


class CTLSyntaxError(ValueError):
    """Formula or spec-file parse failure with a 1-based position."""

    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        text = f"line {line}, column {column}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


class InvalidConfig(ValueError):
    """Simulation configuration outside its valid range."""

"""
Exceptions raised across the package.

Every error derives from LcrlError so callers (and the command line driver)
can tell library failures apart from programming errors.
"""

from typing import Iterable, Optional


class LcrlError(Exception):
    """Root of all library errors."""


class LtlSyntaxError(LcrlError):
    def __init__(self, text: str, position: Optional[int], expected: Iterable[str]):
        self.text = text
        self.position = position
        self.expected = sorted(set(expected or ()))
        where = "end of input" if position is None or position < 0 else f"position {position}"
        hint = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"cannot parse {text!r} at {where}{hint}")


class UnknownAtom(LcrlError):
    def __init__(self, name: str, alphabet: Iterable[str]):
        self.name = name
        self.alphabet = sorted(alphabet)
        super().__init__(f"atom {name!r} is not in the alphabet {self.alphabet}")


class InvalidLength(LcrlError):
    pass


class UnsupportedFragment(LcrlError):
    def __init__(self, subformula, reason: str = "outside the supported fragment"):
        self.subformula = subformula
        super().__init__(f"{subformula}: {reason}")


class LdbaValidationError(LcrlError):
    """Base class for automata that break the limit-deterministic structure."""


class NotLimitDeterministic(LdbaValidationError):
    def __init__(self, state: str, letter, reason: str = "nondeterministic transition"):
        self.state = state
        self.letter = letter
        super().__init__(f"{reason} at state {state!r} on letter {sorted(letter)}")


class AcceptanceOutsideQD(LdbaValidationError):
    def __init__(self, index: int, state: str):
        self.index = index
        self.state = state
        super().__init__(f"acceptance set F{index + 1} contains {state!r}, which is not in the deterministic part")


class EpsilonInAccepting(LdbaValidationError):
    def __init__(self, state: str):
        self.state = state
        super().__init__(f"state {state!r} of the deterministic part has epsilon successors")


class UnknownName(LcrlError):
    def __init__(self, name: str, choices: Iterable[str]):
        self.name = name
        self.choices = sorted(choices)
        super().__init__(f"unknown name {name!r}; choose from {', '.join(self.choices)}")


class FormatError(LcrlError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class InvalidAction(LcrlError):
    def __init__(self, state, action):
        self.state = state
        self.action = action
        super().__init__(f"action {action!r} is not available in state {state!r}")


class TooLarge(LcrlError):
    def __init__(self, size: int, limit: int, what: str = "state space"):
        self.size = size
        self.limit = limit
        super().__init__(f"{what} of size {size} exceeds the limit {limit}")


class NotEnumerable(LcrlError):
    pass


class ConfigError(LcrlError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonConvergence(LcrlError):
    def __init__(self, sweeps: int, residual: float):
        self.sweeps = sweeps
        self.residual = residual
        super().__init__(f"no convergence after {sweeps} sweeps (residual {residual:.3e})")


class MismatchedFixture(LcrlError):
    pass

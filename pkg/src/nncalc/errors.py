"""Exception hierarchy shared by all modules.

Errors that an audit probe is expected to catch carry their witness data as
attributes, so a finding can reproduce the violation later.
"""

from __future__ import annotations


class NncError(Exception):
    """Base class for all library errors."""


class DomainError(NncError):
    """An argument lies outside the domain (or codomain) it must belong to."""


class ParamError(NncError):
    """A bijection parameter is missing, unknown, or inadmissible."""


class ParseError(NncError):
    """Text does not match the bijection-spec or function-spec grammar."""


class ClosureError(NncError):
    """An induced operation left the bijection's codomain.

    Signals non-closure of the pulled-back operation; the witness operands
    and the offending intermediate value are attached.
    """

    def __init__(self, message: str, *, operands: tuple[float, float],
                 intermediate: float, spec_text: str):
        super().__init__(message)
        self.operands = operands
        self.intermediate = intermediate
        self.spec_text = spec_text


class DivisionByNeutral(NncError):
    """Induced division by an element that maps to zero."""


class WeightError(NncError):
    """Weight vector is negative, empty, or does not sum to one."""


class EntropyDomainError(NncError):
    """The generalized entropy is undefined; carries the offending argument."""

    def __init__(self, message: str, *, argument: float, stage: str):
        super().__init__(message)
        self.argument = argument
        self.stage = stage  # "term" (f(ln p) undefined) or "total" (f^-1 arg)


class ModelError(NncError):
    """A hidden-variable model is malformed or missing required entries."""


class LimitError(NncError):
    """A request exceeds a hard enumeration or resource guard."""


class SingularInput(NncError):
    """Input hits a pole of a closed-form expression (e.g. b1*b2 = -1)."""

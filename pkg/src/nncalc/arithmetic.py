"""Arithmetic induced on an interval by pulling real operations through a
bijection: a (+) b = f^-1(f(a) + f(b)), and likewise for -, *, /.

All operations are homomorphisms by construction, so f(a (+) b) = f(a) + f(b)
up to rounding.  Non-closure is a first-class outcome: when f(a) + f(b)
leaves the codomain the inverse is undefined and a :class:`ClosureError`
carrying the witness pair is raised, which the audit battery catches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bijection import BijectionSpec
from .errors import (ClosureError, DivisionByNeutral, DomainError, WeightError)

__all__ = [
    "InducedArithmetic",
    "nn_add",
    "nn_sub",
    "nn_mul",
    "nn_div",
    "neutral_elements",
    "quasi_arithmetic_mean",
    "cauchy_residual",
]

WEIGHT_SUM_TOL = 1e-9


def _pull_back(total: float, f: BijectionSpec, a: float, b: float,
               op_name: str) -> float:
    if not f.codomain.contains(total):
        raise ClosureError(
            f"{op_name} under {f.text}: intermediate {total!r} left the "
            f"codomain {f.codomain} (witness operands {a!r}, {b!r})",
            operands=(a, b), intermediate=total, spec_text=f.text)
    return f.inverse(total)


def nn_add(a: float, b: float, f: BijectionSpec) -> float:
    """f^-1(f(a) + f(b))."""
    return _pull_back(f.forward(a) + f.forward(b), f, a, b, "nn_add")


def nn_sub(a: float, b: float, f: BijectionSpec) -> float:
    """f^-1(f(a) - f(b)); inverse of nn_add in its second operand."""
    return _pull_back(f.forward(a) - f.forward(b), f, a, b, "nn_sub")


def nn_mul(a: float, b: float, f: BijectionSpec) -> float:
    """f^-1(f(a) * f(b))."""
    return _pull_back(f.forward(a) * f.forward(b), f, a, b, "nn_mul")


def nn_div(a: float, b: float, f: BijectionSpec) -> float:
    """f^-1(f(a) / f(b)); DivisionByNeutral when f(b) = 0."""
    fb = f.forward(b)
    if fb == 0.0:
        raise DivisionByNeutral(
            f"nn_div under {f.text}: divisor {b!r} maps to zero")
    return _pull_back(f.forward(a) / fb, f, a, b, "nn_div")


def neutral_elements(f: BijectionSpec) -> tuple[float, float]:
    """(f^-1(0), f^-1(1)): additive and multiplicative neutrals.

    DomainError when 0 or 1 lies outside the codomain (exp, for instance,
    has no additive neutral because its codomain is (0, inf)).
    """
    for needed, kind in ((0.0, "additive"), (1.0, "multiplicative")):
        if not f.codomain.contains(needed):
            raise DomainError(
                f"{f.text} has no {kind} neutral: {needed} outside "
                f"codomain {f.codomain}")
    return f.inverse(0.0), f.inverse(1.0)


def quasi_arithmetic_mean(f: BijectionSpec, values: list[float],
                          weights: list[float] | None = None) -> float:
    """Kolmogorov-Nagumo mean f^-1(sum_i w_i f(v_i)).

    Weights must be non-negative and sum to one within 1e-9 (they are then
    renormalized exactly); omitted weights mean uniform.  The reciprocal
    bijection yields the harmonic mean.
    """
    if not values:
        raise WeightError("quasi_arithmetic_mean requires at least one value")
    if weights is None:
        weights = [1.0 / len(values)] * len(values)
    if len(weights) != len(values):
        raise WeightError(
            f"{len(weights)} weights for {len(values)} values")
    if any(w < 0 for w in weights):
        raise WeightError(f"negative weight in {weights!r}")
    total_w = sum(weights)
    if abs(total_w - 1.0) > WEIGHT_SUM_TOL:
        raise WeightError(f"weights sum to {total_w!r}, expected 1")
    total = sum((w / total_w) * f.forward(v) for w, v in zip(weights, values))
    if not f.codomain.contains(total):
        raise DomainError(
            f"quasi_arithmetic_mean under {f.text}: pulled-back total "
            f"{total!r} outside codomain {f.codomain}")
    return f.inverse(total)


def cauchy_residual(f: BijectionSpec, x: float, y: float) -> float:
    """|f(x + y) - (f(x) + f(y))|: the additivity defect of f.

    Zero for every (x, y) exactly when f is linear through the origin; an
    affine map with offset b fails by |b|.
    """
    return abs(f.forward(x + y) - (f.forward(x) + f.forward(y)))


@dataclass(frozen=True)
class InducedArithmetic:
    """The four induced operations bound to one working bijection."""

    f: BijectionSpec

    def add(self, a: float, b: float) -> float:
        return nn_add(a, b, self.f)

    def sub(self, a: float, b: float) -> float:
        return nn_sub(a, b, self.f)

    def mul(self, a: float, b: float) -> float:
        return nn_mul(a, b, self.f)

    def div(self, a: float, b: float) -> float:
        return nn_div(a, b, self.f)

    def neutrals(self) -> tuple[float, float]:
        return neutral_elements(self.f)

    def mean(self, values: list[float],
             weights: list[float] | None = None) -> float:
        return quasi_arithmetic_mean(self.f, values, weights)

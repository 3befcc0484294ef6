"""Catalog of bijections between real intervals, with a textual spec parser.

Each catalog entry maps an interval onto an interval and can be evaluated
forward and backward.  Every entry except ``cantor`` is strictly monotone
with an analytic inverse; ``cantor`` is the devil's-staircase function,
which is only non-decreasing, so its "inverse" is a generalized inverse
returning the leftmost preimage.

Spec grammar (exact): ``name[:key=value[,key=value]*]`` with values parsed
as decimal reals or integers, e.g. ``power:n=3`` or ``linear:a=2,b=0.5``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import DomainError, ParamError, ParseError

__all__ = [
    "Interval",
    "BijectionSpec",
    "REAL_LINE",
    "catalog_names",
    "catalog_default_specs",
    "make_bijection",
    "parse_bijection_spec",
    "forward",
    "inverse",
    "cantor_value",
    "cantor_generalized_inverse",
    "roundtrip_residual",
]

DEFAULT_CANTOR_DEPTH = 48
DEFAULT_OMEGA_LAMBDA = 0.7


@dataclass(frozen=True)
class Interval:
    """A real interval with independently open or closed endpoints."""

    lo: float
    hi: float
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ParamError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, x: float) -> bool:
        if math.isnan(x):
            return False
        if self.open_lo:
            if not x > self.lo:
                return False
        elif not x >= self.lo:
            return False
        if self.open_hi:
            return x < self.hi
        return x <= self.hi

    def __str__(self) -> str:
        left = "(" if self.open_lo else "["
        right = ")" if self.open_hi else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


REAL_LINE = Interval(-math.inf, math.inf, open_lo=True, open_hi=True)
POSITIVE_HALF_LINE = Interval(0.0, math.inf, open_lo=True, open_hi=True)
UNIT_INTERVAL = Interval(0.0, 1.0)
OPEN_UNIT_BALL = Interval(-1.0, 1.0, open_lo=True, open_hi=True)


@dataclass(frozen=True)
class BijectionSpec:
    """A named, parameterized bijection with its domain and codomain.

    ``monotone`` is "increasing", "decreasing" (reciprocal only) or
    "nondecreasing" (cantor only).  The evaluation callables are carried
    privately; identity of a spec is its name and parameters.
    """

    name: str
    params: dict[str, float]
    domain: Interval
    codomain: Interval
    monotone: str = "increasing"
    _fwd: Callable[[float], float] = field(repr=False, compare=False, default=None)
    _inv: Callable[[float], float] = field(repr=False, compare=False, default=None)

    @property
    def text(self) -> str:
        """Canonical spec text, parseable by :func:`parse_bijection_spec`."""
        if not self.params:
            return self.name
        parts = ",".join(f"{k}={_format_value(v)}" for k, v in self.params.items())
        return f"{self.name}:{parts}"

    def forward(self, x: float) -> float:
        if not self.domain.contains(x):
            raise DomainError(
                f"{self.text}: argument {x!r} outside domain {self.domain}")
        return self._fwd(x)

    def inverse(self, r: float) -> float:
        if not self.codomain.contains(r):
            raise DomainError(
                f"{self.text}: value {r!r} outside codomain {self.codomain}")
        return self._inv(r)


def _format_value(v) -> str:
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return repr(v)


def forward(spec: BijectionSpec, x: float) -> float:
    """Evaluate the bijection at ``x``; DomainError outside its domain."""
    return spec.forward(x)


def inverse(spec: BijectionSpec, r: float) -> float:
    """Evaluate the (generalized) inverse at ``r``."""
    return spec.inverse(r)


# ---------------------------------------------------------------------------
# Cantor function
# ---------------------------------------------------------------------------

def cantor_value(x, depth: int = DEFAULT_CANTOR_DEPTH) -> float:
    """Devil's-staircase value C(x) on [0, 1], truncated at ``depth`` digits.

    Ternary digits of ``x`` are extracted by repeated multiply-by-3 with
    floor; the scan stops at the first digit equal to 1.  The result is the
    binary number whose bits are the earlier digits halved, followed by a
    terminal 1 when a 1-digit was found.  Passing a ``fractions.Fraction``
    runs the same loop in exact rational arithmetic, which matters for
    triadic rationals such as 1/3 where binary floats cannot represent the
    input exactly.
    """
    if depth < 1:
        raise ParamError(f"cantor depth must be >= 1, got {depth}")
    if isinstance(x, Fraction):
        in_range = 0 <= x <= 1
    else:
        in_range = not math.isnan(x) and 0.0 <= x <= 1.0
    if not in_range:
        raise DomainError(f"cantor_value requires 0 <= x <= 1, got {x!r}")
    if x == 0:
        return 0.0
    if x == 1:
        return 1.0

    bits: list[int] = []
    y = x
    for _ in range(depth):
        y = y * 3
        d = int(y)
        if d > 2:  # guard against 3.0 from rounding at the top edge
            d = 2
        y = y - d
        if d == 1:
            bits.append(1)
            break
        bits.append(d // 2)

    value = 0.0
    for i in reversed(range(len(bits))):
        value = (value + bits[i]) * 0.5
    return value


def cantor_generalized_inverse(y, depth: int = DEFAULT_CANTOR_DEPTH,
                               *, exact: bool = False):
    """Leftmost x with C(x) = y, a Cantor-set point.

    Binary digits of ``y`` give ternary digits (doubled) of the preimage.
    When the binary expansion of ``y`` terminates within ``depth`` bits the
    trailing-ones form is used instead, so the infimum of the preimage
    interval is returned (e.g. 0.5 maps to 1/3, the left edge of the middle
    gap, not 2/3).  With ``exact=True`` the exact rational preimage is
    returned; the float return rounds it once, which re-digitizes the point
    at roughly 3**-34 resolution.
    """
    if depth < 1:
        raise ParamError(f"cantor depth must be >= 1, got {depth}")
    if isinstance(y, Fraction):
        in_range = 0 <= y <= 1
    else:
        in_range = not math.isnan(y) and 0.0 <= y <= 1.0
    if not in_range:
        raise DomainError(f"cantor_generalized_inverse requires 0 <= y <= 1, got {y!r}")
    if y == 0:
        return Fraction(0) if exact else 0.0
    if y == 1:
        return Fraction(1) if exact else 1.0

    bits: list[int] = []
    rem = y
    for _ in range(depth):
        rem = rem * 2
        b = int(rem)
        if b > 1:
            b = 1
        rem = rem - b
        bits.append(b)

    if rem == 0:
        # Terminating (dyadic) expansion: switch the last 1-bit to the
        # trailing-ones form so the leftmost preimage is selected.
        last_one = max(i for i, b in enumerate(bits) if b == 1)
        bits[last_one] = 0
        for i in range(last_one + 1, depth):
            bits[i] = 1

    point = Fraction(0)
    third = Fraction(1, 3)
    scale = third
    for b in bits:
        if b:
            point += 2 * scale
        scale *= third
    return point if exact else float(point)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _require_params(name: str, params: dict, allowed: dict) -> dict:
    unknown = set(params) - set(allowed)
    if unknown:
        raise ParamError(f"{name}: unknown parameter(s) {sorted(unknown)}")
    merged = dict(allowed)
    merged.update(params)
    return merged


def _as_positive_int(name: str, key: str, value) -> int:
    if isinstance(value, float):
        if not value.is_integer():
            raise ParamError(f"{name}: {key} must be an integer, got {value!r}")
        value = int(value)
    if not isinstance(value, int) or value < 1:
        raise ParamError(f"{name}: {key} must be a positive integer, got {value!r}")
    return value


def _build_identity(params: dict) -> BijectionSpec:
    _require_params("identity", params, {})
    return BijectionSpec("identity", {}, REAL_LINE, REAL_LINE,
                         _fwd=lambda x: x, _inv=lambda r: r)


def _build_linear(params: dict) -> BijectionSpec:
    p = _require_params("linear", params, {"a": 1.0, "b": 0.0})
    a, b = float(p["a"]), float(p["b"])
    # The catalog invariant demands strictly increasing maps, so the slope
    # must be positive, not merely nonzero.
    if not a > 0:
        raise ParamError(f"linear: slope a must be > 0, got {a!r}")
    return BijectionSpec("linear", {"a": a, "b": b}, REAL_LINE, REAL_LINE,
                         _fwd=lambda x: a * x + b, _inv=lambda r: (r - b) / a)


def _build_arctanh(params: dict) -> BijectionSpec:
    _require_params("arctanh", params, {})
    return BijectionSpec("arctanh", {}, OPEN_UNIT_BALL, REAL_LINE,
                         _fwd=math.atanh, _inv=math.tanh)


def _build_tanh(params: dict) -> BijectionSpec:
    _require_params("tanh", params, {})
    return BijectionSpec("tanh", {}, REAL_LINE, OPEN_UNIT_BALL,
                         _fwd=math.tanh, _inv=math.atanh)


def _build_power(params: dict) -> BijectionSpec:
    p = _require_params("power", params, {"n": 3})
    n = _as_positive_int("power", "n", p["n"])
    if n % 2 == 0:
        raise ParamError(
            f"power: exponent n must be an odd positive integer to stay "
            f"bijective on the reals, got {n}")

    def fwd(x: float) -> float:
        return x ** n

    def inv(r: float) -> float:
        return math.copysign(abs(r) ** (1.0 / n), r)

    return BijectionSpec("power", {"n": n}, REAL_LINE, REAL_LINE,
                         _fwd=fwd, _inv=inv)


def _build_exp(params: dict) -> BijectionSpec:
    _require_params("exp", params, {})
    return BijectionSpec("exp", {}, REAL_LINE, POSITIVE_HALF_LINE,
                         _fwd=math.exp, _inv=math.log)


def _build_log(params: dict) -> BijectionSpec:
    _require_params("log", params, {})
    return BijectionSpec("log", {}, POSITIVE_HALF_LINE, REAL_LINE,
                         _fwd=math.log, _inv=math.exp)


def _build_reciprocal(params: dict) -> BijectionSpec:
    _require_params("reciprocal", params, {})
    # Strictly decreasing involution on (0, inf); generates the harmonic
    # mean and parallel-resistance composition.
    return BijectionSpec("reciprocal", {}, POSITIVE_HALF_LINE, POSITIVE_HALF_LINE,
                         monotone="decreasing",
                         _fwd=lambda x: 1.0 / x, _inv=lambda r: 1.0 / r)


def _build_sinh_cosmo(params: dict) -> BijectionSpec:
    p = _require_params("sinh_cosmo", params, {"omega_lambda": DEFAULT_OMEGA_LAMBDA})
    omega = float(p["omega_lambda"])
    if not 0.0 < omega < 1.0:
        raise ParamError(f"sinh_cosmo: omega_lambda must lie in (0, 1), got {omega!r}")
    k = 1.5 * math.sqrt(omega)

    return BijectionSpec("sinh_cosmo", {"omega_lambda": omega}, REAL_LINE, REAL_LINE,
                         _fwd=lambda t: math.sinh(k * t),
                         _inv=lambda r: math.asinh(r) / k)


def _build_cantor(params: dict) -> BijectionSpec:
    p = _require_params("cantor", params, {"depth": DEFAULT_CANTOR_DEPTH})
    depth = _as_positive_int("cantor", "depth", p["depth"])
    return BijectionSpec("cantor", {"depth": depth}, UNIT_INTERVAL, UNIT_INTERVAL,
                         monotone="nondecreasing",
                         _fwd=lambda x: cantor_value(x, depth),
                         _inv=lambda r: cantor_generalized_inverse(r, depth))


_BUILDERS: dict[str, Callable[[dict], BijectionSpec]] = {
    "identity": _build_identity,
    "linear": _build_linear,
    "arctanh": _build_arctanh,
    "tanh": _build_tanh,
    "power": _build_power,
    "exp": _build_exp,
    "log": _build_log,
    "reciprocal": _build_reciprocal,
    "sinh_cosmo": _build_sinh_cosmo,
    "cantor": _build_cantor,
}


def catalog_names() -> list[str]:
    return list(_BUILDERS)


def catalog_default_specs() -> list[BijectionSpec]:
    """One instance of every catalog entry with default parameters."""
    return [make_bijection(name) for name in _BUILDERS]


def make_bijection(name: str, **params) -> BijectionSpec:
    builder = _BUILDERS.get(name)
    if builder is None:
        raise ParamError(
            f"unknown bijection {name!r}; registered: {', '.join(_BUILDERS)}")
    return builder(params)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[+-]?\d+$")


def parse_bijection_spec(text: str) -> BijectionSpec:
    """Parse ``name[:key=value[,key=value]*]`` into a validated spec."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty bijection spec")
    text = text.strip()
    name, sep, rest = text.partition(":")
    if not _NAME_RE.fullmatch(name):
        raise ParseError(f"invalid bijection name {name!r}")
    params: dict[str, float] = {}
    if sep:
        if not rest:
            raise ParseError(f"{text!r}: expected key=value after ':'")
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            value = value.strip()
            if not eq or not _NAME_RE.fullmatch(key) or not value:
                raise ParseError(f"{text!r}: malformed parameter {item!r}")
            if key in params:
                raise ParseError(f"{text!r}: duplicate parameter {key!r}")
            if _INT_RE.match(value):
                params[key] = int(value)
            else:
                try:
                    params[key] = float(value)
                except ValueError:
                    raise ParseError(f"{text!r}: {value!r} is not a number") from None
    return make_bijection(name, **params)


def roundtrip_residual(spec: BijectionSpec, grid: list[float]) -> float:
    """max |inverse(forward(x)) - x| over the grid; DomainError propagates."""
    worst = 0.0
    for x in grid:
        worst = max(worst, abs(spec.inverse(spec.forward(x)) - x))
    return worst

"""Derivatives of maps between bijection-induced structures.

The derivative of ``A`` at ``x`` is estimated in the pulled-back chart: with
``u0 = f_X(x)``, difference quotients

    q(h) = [f_Y(A(f_X^-1(u0 + h))) - f_Y(A(x))] / h

are evaluated over a decreasing step sweep, Richardson-extrapolated, and the
limit (when one exists) is mapped back through ``f_Y^-1``.  Central
differencing is used whenever both chart points stay inside the domains;
otherwise the quotient falls back to one-sided forward, matching the limit's
structure at domain edges.  Denominators use the realized chart displacement
rather than the nominal step, so the identity bijection reproduces classical
quotients bit-for-bit.

A chart step is only meaningful when the bijection actually realizes it:
every pulled-back point is re-checked with the forward map, and a step whose
roundtrip misses by more than ``PULLBACK_FIDELITY_TOL`` is recorded as a
failed evaluation.  Smooth catalog bijections roundtrip to a few 1e-16;
the depth-48 staircase re-digitizes its generalized-inverse points at
roughly 3**-34, so its flat gaps surface as undefined quotients instead of
being silently papered over by the (algebraically rigged) chart identity.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable

from .bijection import BijectionSpec, make_bijection
from .errors import DomainError, NncError, ParseError

__all__ = [
    "Classification",
    "StepPlan",
    "QuotientSample",
    "DerivativeEstimate",
    "IdentityCheckPoint",
    "IdentityCheckReport",
    "nn_derivative",
    "identity_derivative_check",
    "convergence_classify",
    "parse_function_spec",
    "FUNCTION_REGISTRY_HELP",
]

CONVERGENCE_TOL = 1e-6
DIVERGENCE_FACTOR = 10.0
# Above smooth-bijection roundtrip noise (~1e-15), below the staircase's
# generalized-inverse re-digitization noise (~3e-11).
PULLBACK_FIDELITY_TOL = 1e-12
# A convergence verdict needs this many successive small Richardson diffs.
STABLE_WINDOW = 3


class Classification(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    OSCILLATORY = "oscillatory"
    UNDEFINED_DOMAIN = "undefined_domain"

    def __str__(self) -> str:  # serialize as the bare word
        return self.value


@dataclass(frozen=True)
class StepPlan:
    """Geometric step sweep for the chart quotients."""

    h_max: float = 1e-2
    h_min: float = 1e-10
    ratio: float = 10.0
    richardson: bool = True

    def __post_init__(self):
        if not (0 < self.h_min < self.h_max):
            raise ValueError(f"need 0 < h_min < h_max, got {self.h_min}, {self.h_max}")
        if not self.ratio > 1:
            raise ValueError(f"step ratio must exceed 1, got {self.ratio}")

    def steps(self) -> list[float]:
        out = []
        h = self.h_max
        while h >= self.h_min * (1.0 - 1e-12):
            out.append(h)
            h /= self.ratio
        return out


@dataclass(frozen=True)
class QuotientSample:
    """One sweep row: quotient is None when the evaluation failed."""

    h: float
    quotient: float | None
    faithful: bool = True
    note: str = ""


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float | None
    classification: Classification
    quotient_trace: list[QuotientSample]
    chart_limit: float | None = None

    @property
    def failures(self) -> list[tuple[float, str]]:
        """Offending (h, reason) rows behind an undefined_domain verdict."""
        return [(s.h, s.note) for s in self.quotient_trace
                if s.quotient is None or not s.faithful]


# ---------------------------------------------------------------------------
# Classification of quotient traces
# ---------------------------------------------------------------------------

def _richardson(rows: list[tuple[float, float]], use_richardson: bool) -> list[float]:
    if len(rows) < 2 or not use_richardson:
        return [q for _, q in rows]
    out = []
    for (h0, q0), (h1, q1) in zip(rows, rows[1:]):
        r = h0 / h1
        out.append(q1 + (q1 - q0) / (r - 1.0))
    return out


def _stable_window(estimates: list[float], tol: float) -> tuple[int, float] | None:
    """Best run of STABLE_WINDOW successive diffs all below tol.

    Returns (index of last estimate in the window, its value), preferring
    the window with the smallest worst diff.  Short traces fall back to
    requiring every available diff below tol.
    """
    diffs = [abs(b - a) for a, b in zip(estimates, estimates[1:])]
    if not diffs:
        return None
    if len(diffs) < STABLE_WINDOW:
        if max(diffs) < tol:
            return len(estimates) - 1, estimates[-1]
        return None
    best: tuple[float, int] | None = None
    for i in range(len(diffs) - STABLE_WINDOW + 1):
        worst = max(diffs[i:i + STABLE_WINDOW])
        if worst < tol and (best is None or worst < best[0]):
            best = (worst, i)
    if best is None:
        return None
    end = best[1] + STABLE_WINDOW
    return end, estimates[end]


def _monotone_growth(quotients: list[float], factor: float) -> bool:
    if len(quotients) < 3:
        return False
    mags = [abs(q) for q in quotients]
    if any(b < a for a, b in zip(mags, mags[1:])):
        return False
    return mags[-1] >= factor * mags[0] and mags[-1] > 0.0


def _classify_rows(rows: list[QuotientSample], tol: float, factor: float,
                   use_richardson: bool) -> tuple[Classification, float | None]:
    present = [(s.h, s.quotient) for s in rows
               if s.quotient is not None and math.isfinite(s.quotient)]
    quotients = [q for _, q in present]

    # Divergence is judged first: a quotient blowing up by the step ratio is
    # the dominant behavior even if some steps additionally failed.
    if _monotone_growth(quotients, factor):
        return Classification.DIVERGED, None
    failed = any(s.quotient is None or not math.isfinite(s.quotient)
                 or not s.faithful for s in rows)
    if failed:
        return Classification.UNDEFINED_DOMAIN, None
    window = _stable_window(_richardson(present, use_richardson), tol)
    if window is not None:
        return Classification.CONVERGED, window[1]
    return Classification.OSCILLATORY, None


def convergence_classify(trace: list[tuple[float, float | None]],
                         tol: float = CONVERGENCE_TOL,
                         divergence_factor: float = DIVERGENCE_FACTOR,
                         richardson: bool = True) -> Classification:
    """Classify a (h, quotient) trace; None or non-finite quotients count as
    failed evaluations.  The trace must be non-empty with h strictly
    decreasing."""
    if not trace:
        raise ValueError("empty quotient trace")
    hs = [h for h, _ in trace]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("trace steps must be strictly decreasing")
    rows = [QuotientSample(h, q if q is not None and math.isfinite(q) else None)
            for h, q in trace]
    verdict, _ = _classify_rows(rows, tol, divergence_factor, richardson)
    return verdict


# ---------------------------------------------------------------------------
# The derivative estimator
# ---------------------------------------------------------------------------

def _chart_point(f_x: BijectionSpec, f_y: BijectionSpec,
                 a_func: Callable[[float], float], v: float):
    """Evaluate f_Y(A(f_X^-1(v))) and report pullback fidelity at v."""
    if not f_x.codomain.contains(v):
        raise DomainError(f"chart point {v!r} outside {f_x.text} codomain")
    x_v = f_x.inverse(v)
    faithful = abs(f_x.forward(x_v) - v) <= PULLBACK_FIDELITY_TOL * max(1.0, abs(v))
    try:
        a_v = a_func(x_v)
    except NncError:
        raise
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise DomainError(f"A({x_v!r}) failed: {exc}") from exc
    return f_y.forward(a_v), faithful


def nn_derivative(a_func: Callable[[float], float], x: float,
                  f_x: BijectionSpec, f_y: BijectionSpec,
                  plan: StepPlan | None = None) -> DerivativeEstimate:
    """Estimate DA(x)/Dx for a map A between the induced structures.

    Returns the chart limit pulled back through ``f_Y^-1`` when the quotient
    sweep stabilizes; otherwise the classification describes the failure.
    Chart steps whose pullback leaves a domain, or cannot be faithfully
    realized by the bijection, are recorded with the offending h and lead to
    an ``undefined_domain`` verdict unless the quotients outright diverge.
    """
    plan = plan or StepPlan()
    if not f_x.domain.contains(x):
        raise DomainError(f"x={x!r} outside {f_x.text} domain {f_x.domain}")
    u0 = f_x.forward(x)
    y0 = f_y.forward(a_func(x))  # pre: A maps f_X.domain into f_Y.domain

    rows: list[QuotientSample] = []
    for h in plan.steps():
        hi, lo = u0 + h, u0 - h
        try:
            y_hi, ok_hi = _chart_point(f_x, f_y, a_func, hi)
        except DomainError as exc:
            rows.append(QuotientSample(h, None, note=f"h=+{h:g}: {exc}"))
            continue
        try:
            y_lo, ok_lo = _chart_point(f_x, f_y, a_func, lo)
            q = (y_hi - y_lo) / (hi - lo)
            rows.append(QuotientSample(h, q, faithful=ok_hi and ok_lo))
        except DomainError:
            # One-sided forward quotient at domain edges.
            q = (y_hi - y0) / (hi - u0)
            rows.append(QuotientSample(h, q, faithful=ok_hi,
                                       note=f"h={h:g}: one-sided"))

    verdict, chart_limit = _classify_rows(rows, CONVERGENCE_TOL,
                                          DIVERGENCE_FACTOR, plan.richardson)
    value = None
    if verdict is Classification.CONVERGED:
        if f_y.codomain.contains(chart_limit):
            value = f_y.inverse(chart_limit)
        else:
            verdict = Classification.UNDEFINED_DOMAIN
            rows.append(QuotientSample(plan.h_min, chart_limit, faithful=False,
                                       note="chart limit outside f_Y codomain"))
            chart_limit = None
    return DerivativeEstimate(value=value, classification=verdict,
                              quotient_trace=rows, chart_limit=chart_limit)


# ---------------------------------------------------------------------------
# The Df_X/Dx = 1 check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheckPoint:
    x: float
    classification: Classification
    estimate: float | None
    deviation: float | None  # |estimate - 1| when converged


@dataclass(frozen=True)
class IdentityCheckReport:
    points: list[IdentityCheckPoint]
    counts: dict[str, int]
    max_deviation: float | None  # over converged points; None if none

    @property
    def all_converged(self) -> bool:
        return all(p.classification is Classification.CONVERGED
                   for p in self.points)

    @property
    def converged_count(self) -> int:
        return self.counts.get(Classification.CONVERGED.value, 0)


def identity_derivative_check(f_x: BijectionSpec, grid: list[float],
                              plan: StepPlan | None = None) -> IdentityCheckReport:
    """Check the claim that the bijection's own chart derivative is 1.

    Runs ``nn_derivative`` with A equal to the bijection's forward map and
    the identity on the output side, so the quotient is
    ``[f_X(f_X^-1(f_X(x)+h)) - f_X(x)] / h``.  Smooth bijections converge to
    1 up to rounding; the staircase fails through unfaithful pullbacks.
    """
    f_y = make_bijection("identity")
    points: list[IdentityCheckPoint] = []
    counts: dict[str, int] = {}
    for x in grid:
        est = nn_derivative(f_x.forward, x, f_x, f_y, plan)
        deviation = None
        if est.classification is Classification.CONVERGED:
            deviation = abs(est.value - 1.0)
        points.append(IdentityCheckPoint(x, est.classification,
                                         est.value, deviation))
        key = est.classification.value
        counts[key] = counts.get(key, 0) + 1
    deviations = [p.deviation for p in points if p.deviation is not None]
    return IdentityCheckReport(points=points, counts=counts,
                               max_deviation=max(deviations) if deviations else None)


# ---------------------------------------------------------------------------
# Closed registry of CLI-exposable A functions
# ---------------------------------------------------------------------------

FUNCTION_REGISTRY_HELP = "identity | square | cube | poly:c0,c1,..."

_POLY_RE = re.compile(r"poly:(?P<coeffs>[-+0-9eE., ]+)$")


def parse_function_spec(text: str) -> tuple[str, Callable[[float], float]]:
    """Parse ``identity | square | cube | poly:c0,c1,...`` into a callable."""
    text = text.strip()
    if text == "identity":
        return text, lambda t: t
    if text == "square":
        return text, lambda t: t * t
    if text == "cube":
        return text, lambda t: t * t * t
    m = _POLY_RE.fullmatch(text)
    if m:
        try:
            coeffs = [float(c) for c in m.group("coeffs").split(",")]
        except ValueError:
            raise ParseError(f"bad polynomial coefficients in {text!r}") from None

        def poly(t: float, _c=tuple(coeffs)) -> float:
            acc = 0.0
            for c in reversed(_c):
                acc = acc * t + c
            return acc

        return text, poly
    raise ParseError(f"unknown function spec {text!r}; use {FUNCTION_REGISTRY_HELP}")

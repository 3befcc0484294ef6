"""Composable probe battery turning each claimed pathology into a
machine-checked finding with a reproducible witness.

Probes sample with a seeded generator and additionally pin the canonical
witness points (the velocity pair (0.9, 0.9), the sampling-box corners for
additivity), so thin violation regions cannot be missed by bad luck and a
report is a pure function of (spec, seed, config).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import cauchy_residual, nn_add
from .bijection import BijectionSpec, Interval, roundtrip_residual
from .calculus import (Classification, StepPlan, identity_derivative_check)
from .errors import ClosureError, NncError
from .physics import ProbabilityDistribution, entropy_domain_check

__all__ = [
    "AuditFinding",
    "AuditConfig",
    "AuditReport",
    "closure_probe",
    "cauchy_probe",
    "entropy_probe",
    "differentiability_probe",
    "roundtrip_probe",
    "run_battery",
]

DEFAULT_SEED = 1729
PASS, FAIL, UNDEFINED = "pass", "fail", "undefined"

Witness = list[tuple[str, float]]


@dataclass(frozen=True)
class AuditFinding:
    probe: str
    verdict: str
    witness: Witness | None = None
    residual: float | None = None
    notes: str = ""

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, UNDEFINED):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict != PASS and self.witness is None and self.residual is None:
            raise ValueError(f"{self.verdict} finding must carry a witness "
                             f"or residual")

    def to_dict(self) -> dict:
        return {
            "probe": self.probe,
            "verdict": self.verdict,
            "witness": None if self.witness is None
            else [[label, value] for label, value in self.witness],
            "residual": self.residual,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class AuditConfig:
    seed: int = DEFAULT_SEED
    closure_samples: int = 10_000
    cauchy_samples: int = 2_000
    entropy_dists: int = 200
    derivative_grid_points: int = 9
    roundtrip_grid_points: int = 99
    closure_interval: tuple[float, float] = (-1.0, 1.0)
    cauchy_tol: float = 1e-12
    roundtrip_tol: float = 1e-10
    derivative_dev_tol: float = 1e-6
    plan: StepPlan = field(default_factory=StepPlan)


@dataclass(frozen=True)
class AuditReport:
    bijection: str
    findings: list[AuditFinding]
    seed: int
    sample_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "bijection": self.bijection,
            "seed": self.seed,
            "sample_counts": dict(self.sample_counts),
            "findings": [f.to_dict() for f in self.findings],
        }

    def to_text(self) -> str:
        """Stable machine-readable serialization (field order fixed)."""
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def verdicts(self) -> dict[str, str]:
        return {f.probe: f.verdict for f in self.findings}


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _covers(outer: Interval, lo: float, hi: float) -> bool:
    """Whether [lo, hi] fits inside the closure of ``outer``."""
    return outer.lo <= lo and hi <= outer.hi


def _working_interval(f: BijectionSpec, inset: float = 0.0) -> tuple[float, float]:
    """Bounded interval inside f.domain, at most [-1, 1], optionally inset."""
    lo = max(f.domain.lo, -1.0)
    hi = min(f.domain.hi, 1.0)
    if inset:
        span = hi - lo
        lo += inset * span
        hi -= inset * span
    return lo, hi


def _fraction_grid(f: BijectionSpec, points: int) -> list[float]:
    """Points at fractions 1/(points+1) .. of the working interval."""
    lo, hi = _working_interval(f)
    span = hi - lo
    return [lo + span * (i + 1) / (points + 1) for i in range(points)]


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def closure_probe(f: BijectionSpec, domain: Interval, samples: int,
                  seed: int) -> AuditFinding:
    """Does the induced addition stay inside ``domain``?

    The paper's velocity witness (0.9, 0.9) is evaluated first, then seeded
    uniform pairs; the first escape (or a ClosureError, which is an escape
    from the codomain itself) fails the probe with the witness attached.
    """
    if not _covers(f.domain, domain.lo, domain.hi):
        return AuditFinding(
            probe="closure", verdict=UNDEFINED,
            witness=[("interval_lo", domain.lo), ("interval_hi", domain.hi)],
            notes=f"probe interval {domain} not inside {f.text} "
                  f"domain {f.domain}")
    rng = np.random.default_rng(seed)
    pairs = [(0.9, 0.9)] if domain.contains(0.9) else []
    draws = rng.uniform(domain.lo, domain.hi, size=(samples, 2))
    pairs.extend((float(a), float(b)) for a, b in draws)
    for a, b in pairs:
        if not (f.domain.contains(a) and f.domain.contains(b)):
            continue  # open-endpoint draws carry no information
        try:
            result = nn_add(a, b, f)
        except ClosureError as exc:
            return AuditFinding(
                probe="closure", verdict=FAIL,
                witness=[("a", a), ("b", b), ("intermediate", exc.intermediate)],
                notes=f"f(a)+f(b) left the {f.text} codomain")
        except NncError as exc:
            return AuditFinding(
                probe="closure", verdict=UNDEFINED,
                witness=[("a", a), ("b", b)], notes=str(exc))
        if not domain.contains(result):
            return AuditFinding(
                probe="closure", verdict=FAIL,
                witness=[("a", a), ("b", b), ("result", result)],
                notes=f"induced sum escaped {domain}")
    return AuditFinding(probe="closure", verdict=PASS,
                        notes=f"{len(pairs)} pairs stayed inside {domain}")


def _cauchy_box(f: BijectionSpec) -> tuple[float, float]:
    """Box with x, y and x + y all inside f.domain, clipped to [-1, 1]."""
    d = f.domain
    lo = -1.0 if math.isinf(d.lo) else max(-1.0, d.lo / 2.0)
    hi = 1.0 if math.isinf(d.hi) else min(1.0, d.hi / 2.0)
    # Doubled corners would land exactly on an open endpoint; inset them.
    margin = 1e-6 * (hi - lo)
    if not math.isinf(d.lo) and d.open_lo and lo <= d.lo / 2.0:
        lo += margin
    if not math.isinf(d.hi) and d.open_hi and hi >= d.hi / 2.0:
        hi -= margin
    return lo, hi


def cauchy_probe(f: BijectionSpec, samples: int, seed: int,
                 tol: float = 1e-12) -> AuditFinding:
    """max |f(x+y) - f(x) - f(y)| over the sampling box; pass iff <= tol.

    Box corners are probed first; for the smooth catalog maps the residual
    peaks there, so the witness is deterministic.
    """
    lo, hi = _cauchy_box(f)
    rng = np.random.default_rng(seed)
    pts = [(hi, hi), (lo, lo), (lo, hi)]
    draws = rng.uniform(lo, hi, size=(samples, 2))
    pts.extend((float(x), float(y)) for x, y in draws)
    worst = -1.0
    witness: Witness = []
    for x, y in pts:
        try:
            r = cauchy_residual(f, x, y)
        except NncError as exc:
            return AuditFinding(probe="cauchy", verdict=UNDEFINED,
                                witness=[("x", x), ("y", y)], notes=str(exc))
        if r > worst:
            worst = r
            witness = [("x", x), ("y", y)]
    verdict = PASS if worst <= tol else FAIL
    return AuditFinding(probe="cauchy", verdict=verdict, witness=witness,
                        residual=worst,
                        notes=f"max additivity defect over {len(pts)} pairs "
                              f"in [{lo:g}, {hi:g}]^2")


def _random_distributions(n: int, seed: int) -> list[ProbabilityDistribution]:
    rng = np.random.default_rng(seed)
    dists = []
    for _ in range(n):
        size = int(rng.integers(2, 9))
        raw = rng.random(size) + 1e-12
        p = [float(v) for v in raw / raw.sum()]
        p[-1] = 1.0 - math.fsum(p[:-1])  # make the total exactly one
        dists.append(ProbabilityDistribution(tuple(p)))
    return dists


def entropy_probe(f: BijectionSpec, n_dists: int, seed: int) -> AuditFinding:
    """Is the generalized entropy defined on random distributions?"""
    dists = _random_distributions(n_dists, seed)
    report = entropy_domain_check(f, dists)
    if report.undefined_count == 0:
        return AuditFinding(probe="entropy", verdict=PASS,
                            notes=f"defined on {len(dists)} distributions")
    first = next(v for v in report.verdicts if not v.defined)
    witness = [(f"p{i}", pi) for i, pi in enumerate(first.dist.p)]
    witness.append(("argument", first.argument))
    return AuditFinding(
        probe="entropy", verdict=FAIL, witness=witness,
        notes=f"undefined for {report.undefined_count} of {len(dists)} "
              f"distributions")


def differentiability_probe(f: BijectionSpec, grid: list[float] | None = None,
                            plan: StepPlan | None = None,
                            dev_tol: float = 1e-6,
                            grid_points: int = 9) -> AuditFinding:
    """Does the bijection's own chart derivative converge to 1 everywhere?"""
    grid = grid if grid is not None else _fraction_grid(f, grid_points)
    report = identity_derivative_check(f, grid, plan)
    bad = [p for p in report.points
           if p.classification is not Classification.CONVERGED
           or p.deviation > dev_tol]
    counts = ", ".join(f"{k}={v}" for k, v in sorted(report.counts.items()))
    if not bad:
        return AuditFinding(
            probe="differentiability", verdict=PASS,
            residual=report.max_deviation,
            notes=f"all {len(grid)} points converged ({counts})")
    first = bad[0]
    witness: Witness = [("x", first.x)]
    if first.estimate is not None:
        witness.append(("estimate", first.estimate))
    return AuditFinding(
        probe="differentiability", verdict=FAIL, witness=witness,
        residual=report.max_deviation,
        notes=f"{len(bad)} of {len(grid)} points failed; "
              f"first is {first.classification.value} ({counts})")


def roundtrip_probe(f: BijectionSpec, grid_points: int = 99,
                    tol: float = 1e-10) -> AuditFinding:
    """max |inverse(forward(x)) - x| over an interior grid."""
    grid = _fraction_grid(f, grid_points)
    residual = roundtrip_residual(f, grid)
    if residual < tol:
        return AuditFinding(probe="roundtrip", verdict=PASS, residual=residual,
                            notes=f"{grid_points} interior points")
    worst = max(grid, key=lambda x: abs(f.inverse(f.forward(x)) - x))
    return AuditFinding(probe="roundtrip", verdict=FAIL,
                        witness=[("x", worst)], residual=residual,
                        notes="generalized inverse returns the leftmost "
                              "preimage, not the input")


# ---------------------------------------------------------------------------
# Battery
# ---------------------------------------------------------------------------

def run_battery(f: BijectionSpec, config: AuditConfig | None = None) -> AuditReport:
    """Run all probes in fixed order; output is deterministic in
    (spec, seed, config)."""
    cfg = config or AuditConfig()
    lo, hi = cfg.closure_interval
    closure_domain = Interval(lo, hi)
    findings = [
        closure_probe(f, closure_domain, cfg.closure_samples, cfg.seed),
        cauchy_probe(f, cfg.cauchy_samples, cfg.seed + 1, cfg.cauchy_tol),
        entropy_probe(f, cfg.entropy_dists, cfg.seed + 2),
        differentiability_probe(f, None, cfg.plan, cfg.derivative_dev_tol,
                                cfg.derivative_grid_points),
        roundtrip_probe(f, cfg.roundtrip_grid_points, cfg.roundtrip_tol),
    ]
    counts = {
        "closure": cfg.closure_samples,
        "cauchy": cfg.cauchy_samples,
        "entropy": cfg.entropy_dists,
        "derivative_grid": cfg.derivative_grid_points,
        "roundtrip_grid": cfg.roundtrip_grid_points,
    }
    return AuditReport(bijection=f.text, findings=findings, seed=cfg.seed,
                       sample_counts=counts)

"""Physical applications of the induced arithmetic and their failure modes:
velocity composition, generalized entropy, average speed, and the scale
factor reparametrization check for a flat matter-plus-Lambda cosmology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arithmetic import nn_add
from .bijection import BijectionSpec, make_bijection
from .errors import DomainError, EntropyDomainError, SingularInput

__all__ = [
    "ProbabilityDistribution",
    "CosmologyParams",
    "VelocityComposition",
    "velocity_compose",
    "einstein_compose",
    "nn_entropy",
    "EntropyVerdict",
    "EntropyDomainReport",
    "entropy_domain_check",
    "harmonic_average_speed",
    "lcdm_scale_factor",
    "cosmo_bijection_ratio",
]

_DIST_SUM_TOL_STRICT = 1e-12
_DIST_SUM_TOL_INPUT = 1e-9


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Finite probability vector; entries >= 0 summing to 1 within 1e-12."""

    p: tuple[float, ...]

    def __post_init__(self):
        if not self.p:
            raise DomainError("empty probability distribution")
        if any(pi < 0 or math.isnan(pi) for pi in self.p):
            raise DomainError(f"negative or NaN probability in {self.p!r}")
        total = math.fsum(self.p)
        if abs(total - 1.0) > _DIST_SUM_TOL_STRICT:
            raise DomainError(f"probabilities sum to {total!r}, expected 1")

    @classmethod
    def from_raw(cls, values: list[float]) -> "ProbabilityDistribution":
        """Accept input summing to 1 within 1e-9 and renormalize exactly."""
        if not values:
            raise DomainError("empty probability distribution")
        if any(v < 0 or math.isnan(v) for v in values):
            raise DomainError(f"negative or NaN probability in {values!r}")
        total = math.fsum(values)
        if abs(total - 1.0) > _DIST_SUM_TOL_INPUT:
            raise DomainError(f"probabilities sum to {total!r}, expected 1 "
                              f"within {_DIST_SUM_TOL_INPUT}")
        return cls(tuple(v / total for v in values))


@dataclass(frozen=True)
class CosmologyParams:
    """Times in H0 = 1 units; the paper's fiducial dark-energy fraction."""

    omega_lambda: float = 0.7
    t_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.omega_lambda < 1.0:
            raise DomainError(f"omega_lambda must lie in (0, 1), "
                              f"got {self.omega_lambda!r}")
        if not self.t_grid:
            raise DomainError("empty time grid")
        if self.t_grid[0] <= 0.0:
            raise DomainError("time grid must be strictly positive")
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise DomainError("time grid must be strictly increasing")


# ---------------------------------------------------------------------------
# Velocity composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VelocityComposition:
    value: float
    superluminal: bool


def velocity_compose(b1: float, b2: float, f: BijectionSpec) -> VelocityComposition:
    """Compose velocities (c = 1 units) under the induced addition.

    Superluminality is flagged, not raised: the point of the composition
    audit is precisely that the number comes out and is wrong.
    """
    for b in (b1, b2):
        if not -1.0 <= b <= 1.0:
            raise DomainError(f"velocity {b!r} outside [-1, 1]")
        if not f.domain.contains(b):
            raise DomainError(f"velocity {b!r} outside {f.text} domain {f.domain}")
    value = nn_add(b1, b2, f)
    return VelocityComposition(value=value, superluminal=abs(value) > 1.0)


def einstein_compose(b1: float, b2: float) -> float:
    """(b1 + b2) / (1 + b1*b2); never exceeds 1 in magnitude."""
    for b in (b1, b2):
        if not abs(b) <= 1.0:
            raise DomainError(f"velocity {b!r} outside [-1, 1]")
    denom = 1.0 + b1 * b2
    if denom == 0.0:
        raise SingularInput(f"einstein_compose singular at b1*b2 = -1 "
                            f"(b1={b1!r}, b2={b2!r})")
    return (b1 + b2) / denom


# ---------------------------------------------------------------------------
# Generalized entropy
# ---------------------------------------------------------------------------

def nn_entropy(dist: ProbabilityDistribution, f: BijectionSpec) -> float:
    """f^-1(-sum_i p_i f(ln p_i)), zero-probability terms omitted.

    Raises EntropyDomainError with the offending argument when some
    f(ln p_i) is undefined or the pulled-back total leaves the codomain;
    with f = exp the total is -sum p_i^2, undefined for every distribution.
    """
    terms = []
    for p_i in dist.p:
        if p_i == 0.0:
            continue  # 0 * f(ln 0) taken as its limit, 0
        log_p = math.log(p_i)
        if not f.domain.contains(log_p):
            raise EntropyDomainError(
                f"entropy under {f.text}: ln({p_i!r}) = {log_p!r} outside "
                f"domain {f.domain}", argument=log_p, stage="term")
        terms.append(p_i * f.forward(log_p))
    total = -math.fsum(terms)
    if not f.codomain.contains(total):
        raise EntropyDomainError(
            f"entropy under {f.text}: argument {total!r} outside "
            f"codomain {f.codomain}", argument=total, stage="total")
    return f.inverse(total)


@dataclass(frozen=True)
class EntropyVerdict:
    dist: ProbabilityDistribution
    defined: bool
    argument: float  # inner total, or the offending value when undefined
    value: float | None = None


@dataclass(frozen=True)
class EntropyDomainReport:
    verdicts: list[EntropyVerdict]

    @property
    def defined_count(self) -> int:
        return sum(v.defined for v in self.verdicts)

    @property
    def undefined_count(self) -> int:
        return len(self.verdicts) - self.defined_count


def entropy_domain_check(f: BijectionSpec,
                         dists: list[ProbabilityDistribution]) -> EntropyDomainReport:
    """Evaluate definedness of the generalized entropy per distribution."""
    verdicts = []
    for dist in dists:
        try:
            value = nn_entropy(dist, f)
        except EntropyDomainError as exc:
            verdicts.append(EntropyVerdict(dist, False, exc.argument))
        else:
            inner = -math.fsum(p * f.forward(math.log(p))
                               for p in dist.p if p > 0.0)
            verdicts.append(EntropyVerdict(dist, True, inner, value))
    return EntropyDomainReport(verdicts)


# ---------------------------------------------------------------------------
# Average speed and cosmology
# ---------------------------------------------------------------------------

def harmonic_average_speed(v1: float, v2: float) -> float:
    """2*v1*v2 / (v1 + v2): total distance over total time for equal legs."""
    if v1 <= 0 or v2 <= 0:
        raise DomainError(f"speeds must be positive, got {v1!r}, {v2!r}")
    return 2.0 * v1 * v2 / (v1 + v2)


def lcdm_scale_factor(t: float, omega_lambda: float = 0.7) -> float:
    """a(t) for flat matter+Lambda cosmology in H0 = 1 units.

    a(t) = ((1 - OL)/OL)^(1/3) * sinh^(2/3)((3/2) sqrt(OL) t).
    """
    if t <= 0:
        raise DomainError(f"time must be positive, got {t!r}")
    if not 0.0 < omega_lambda < 1.0:
        raise DomainError(f"omega_lambda must lie in (0, 1), got {omega_lambda!r}")
    prefactor = ((1.0 - omega_lambda) / omega_lambda) ** (1.0 / 3.0)
    return prefactor * math.sinh(1.5 * math.sqrt(omega_lambda) * t) ** (2.0 / 3.0)


def cosmo_bijection_ratio(params: CosmologyParams,
                          bijection: BijectionSpec | None = None) -> float:
    """Constancy defect of a(t) / f(t)^(2/3) over the time grid.

    With f the sinh map whose rate matches (3/2) sqrt(omega_lambda), the
    ratio is constant up to rounding, which is the whole content of the
    reparametrization claim; a mismatched rate breaks proportionality.
    Returns max_t |r(t)/r(t0) - 1|.
    """
    f = bijection or make_bijection("sinh_cosmo", omega_lambda=params.omega_lambda)
    ratios = []
    for t in params.t_grid:
        base = f.forward(t)
        if base <= 0.0:
            raise DomainError(f"bijection value {base!r} at t={t!r} is not "
                              f"positive; cannot form f(t)^(2/3)")
        ratios.append(lcdm_scale_factor(t, params.omega_lambda) / base ** (2.0 / 3.0))
    r0 = ratios[0]
    return max(abs(r / r0 - 1.0) for r in ratios)

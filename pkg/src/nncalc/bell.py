"""Finite hidden-variable models with setting-dependent distributions.

Expectation values take the form sum_l rho(l | a, b) A(a, l) (*) B(b, l)
where (*) is the induced product.  Because outcomes are +/-1 and odd-power
bijections fix +/-1, the induced product changes nothing there; what breaks
the classical bound is letting rho depend on the measurement settings.  The
enumeration oracle establishes |S| <= 2 whenever that dependence is absent.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .arithmetic import nn_mul
from .bijection import BijectionSpec, make_bijection
from .errors import LimitError, ModelError

__all__ = [
    "HiddenVariableModel",
    "ChshSettings",
    "IndependenceReport",
    "nn_expectation",
    "chsh",
    "measurement_independence_audit",
    "brute_force_classical_bound",
    "demo_measurement_dependent_model",
    "model_from_dict",
    "model_to_dict",
    "load_model",
]

_RHO_SUM_TOL = 1e-12


@dataclass(frozen=True)
class HiddenVariableModel:
    """Finite lambda set with +/-1 outcome tables and per-pair weights.

    ``outcomes_a``/``outcomes_b`` map (setting, lambda) to exactly +1 or -1;
    ``rho`` maps a setting pair (a, b) to a probability vector over the
    lambdas.  Measurement independence means all those vectors coincide.
    """

    lambdas: tuple[str, ...]
    outcomes_a: dict[tuple[str, str], int]
    outcomes_b: dict[tuple[str, str], int]
    rho: dict[tuple[str, str], dict[str, float]]

    def __post_init__(self):
        if not self.lambdas:
            raise ModelError("model needs at least one lambda")
        if len(set(self.lambdas)) != len(self.lambdas):
            raise ModelError("duplicate lambda identifiers")
        known = set(self.lambdas)
        for label, table in (("outcomes_A", self.outcomes_a),
                             ("outcomes_B", self.outcomes_b)):
            for (setting, lam), value in table.items():
                if lam not in known:
                    raise ModelError(f"{label}[{setting!r}] references unknown "
                                     f"lambda {lam!r}")
                if value not in (-1, 1):
                    raise ModelError(f"{label}[{setting!r}, {lam!r}] must be "
                                     f"+1 or -1, got {value!r}")
        for pair, weights in self.rho.items():
            unknown = set(weights) - known
            if unknown:
                raise ModelError(f"rho{pair!r} references unknown lambdas "
                                 f"{sorted(unknown)}")
            if any(w < 0 for w in weights.values()):
                raise ModelError(f"rho{pair!r} has a negative weight")
            total = math.fsum(weights.values())
            if abs(total - 1.0) > _RHO_SUM_TOL:
                raise ModelError(f"rho{pair!r} sums to {total!r}, expected 1")

    @property
    def settings_a(self) -> list[str]:
        return sorted({s for s, _ in self.outcomes_a})

    @property
    def settings_b(self) -> list[str]:
        return sorted({s for s, _ in self.outcomes_b})

    def weight_vector(self, a: str, b: str) -> list[float]:
        weights = self.rho.get((a, b))
        if weights is None:
            raise ModelError(f"no rho entry for setting pair ({a!r}, {b!r})")
        return [weights.get(lam, 0.0) for lam in self.lambdas]


@dataclass(frozen=True)
class ChshSettings:
    a: str
    a_prime: str
    b: str
    b_prime: str

    def pairs(self) -> list[tuple[str, str, float]]:
        """The four correlator pairs with their signs in S."""
        return [(self.a, self.b, 1.0), (self.a, self.b_prime, 1.0),
                (self.a_prime, self.b, 1.0), (self.a_prime, self.b_prime, -1.0)]


def nn_expectation(model: HiddenVariableModel, a: str, b: str,
                   f: BijectionSpec | None = None) -> float:
    """sum_l rho(a,b)(l) * nn_mul(A(a,l), B(b,l), f)."""
    f = f or make_bijection("identity")
    weights = model.rho.get((a, b))
    if weights is None:
        raise ModelError(f"no rho entry for setting pair ({a!r}, {b!r})")
    total = 0.0
    for lam, w in weights.items():
        if w == 0.0:
            continue
        try:
            out_a = model.outcomes_a[(a, lam)]
            out_b = model.outcomes_b[(b, lam)]
        except KeyError as exc:
            raise ModelError(f"missing outcome entry {exc.args[0]!r}") from None
        total += w * nn_mul(float(out_a), float(out_b), f)
    return total


def chsh(model: HiddenVariableModel, s: ChshSettings,
         f: BijectionSpec | None = None) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    return math.fsum(sign * nn_expectation(model, a, b, f)
                     for a, b, sign in s.pairs())


# ---------------------------------------------------------------------------
# Measurement-independence audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    max_distance: float
    witness_pair: tuple[str, str]
    distances: dict[tuple[str, str], float]


def measurement_independence_audit(model: HiddenVariableModel,
                                   tol: float = 1e-9) -> IndependenceReport:
    """Total-variation distance of each rho(a,b) from the pooled average.

    The pooled average over all setting pairs serves as the reference
    setting-free distribution; any distance above ``tol`` convicts the model
    of measurement dependence, with the worst pair as witness.
    """
    pairs = sorted(model.rho)
    if not pairs:
        raise ModelError("model has no rho entries to audit")
    vectors = {pair: model.weight_vector(*pair) for pair in pairs}
    n = len(model.lambdas)
    pooled = [math.fsum(vectors[pair][i] for pair in pairs) / len(pairs)
              for i in range(n)]
    distances = {
        pair: 0.5 * math.fsum(abs(v - p) for v, p in zip(vectors[pair], pooled))
        for pair in pairs
    }
    witness = max(pairs, key=lambda pair: distances[pair])
    worst = distances[witness]
    return IndependenceReport(independent=worst <= tol, max_distance=worst,
                              witness_pair=witness, distances=distances)


# ---------------------------------------------------------------------------
# Enumeration oracle for the classical bound
# ---------------------------------------------------------------------------

MAX_ENUMERATION_LAMBDAS = 8


def brute_force_classical_bound(n_lambda: int,
                                s: ChshSettings | None = None) -> float:
    """Exhaustive max |S| over deterministic models with setting-free rho.

    Enumerates every deterministic outcome assignment (16**n_lambda joint
    tables over the four settings) against every vertex of the shared-rho
    simplex; mixtures cannot beat vertices, so this is the exact classical
    bound, which comes out as 2.
    """
    if n_lambda < 1:
        raise LimitError(f"n_lambda must be positive, got {n_lambda}")
    if n_lambda > MAX_ENUMERATION_LAMBDAS:
        raise LimitError(f"enumeration guard: n_lambda <= "
                         f"{MAX_ENUMERATION_LAMBDAS}, got {n_lambda}")
    # Per-lambda strategy: outcomes (A(a), A(a'), B(b), B(b')).
    strategies = list(itertools.product((-1, 1), repeat=4))
    s_value = [aa * bb + aa * bp + ap * bb - ap * bp
               for aa, ap, bb, bp in strategies]
    best = 0.0
    for table in itertools.product(range(16), repeat=n_lambda):
        for vertex in range(n_lambda):
            best = max(best, abs(s_value[table[vertex]]))
    return float(best)


# ---------------------------------------------------------------------------
# Demo model and file format
# ---------------------------------------------------------------------------

def demo_measurement_dependent_model() -> tuple[HiddenVariableModel, ChshSettings]:
    """Four one-atom distributions, one per setting pair, reaching S = 4.

    Each pair's distribution concentrates on a lambda whose outcome product
    carries the sign that maximizes that pair's term in S.
    """
    lambdas = ("l1", "l2", "l3", "l4")
    outcomes_a = {}
    outcomes_b = {}
    per_lambda = {
        "l1": (1, 1, 1, 1),    # A(a1), A(a2), B(b1), B(b2)
        "l2": (1, -1, -1, 1),
        "l3": (-1, 1, 1, -1),
        "l4": (1, 1, 1, -1),
    }
    for lam, (aa, ap, bb, bp) in per_lambda.items():
        outcomes_a[("a1", lam)] = aa
        outcomes_a[("a2", lam)] = ap
        outcomes_b[("b1", lam)] = bb
        outcomes_b[("b2", lam)] = bp
    one_atom = lambda lam: {l: (1.0 if l == lam else 0.0) for l in lambdas}
    rho = {
        ("a1", "b1"): one_atom("l1"),
        ("a1", "b2"): one_atom("l2"),
        ("a2", "b1"): one_atom("l3"),
        ("a2", "b2"): one_atom("l4"),
    }
    model = HiddenVariableModel(lambdas, outcomes_a, outcomes_b, rho)
    return model, ChshSettings(a="a1", a_prime="a2", b="b1", b_prime="b2")


def model_from_dict(data: dict) -> HiddenVariableModel:
    """Build a model from the documented JSON layout.

    Layout: ``lambdas`` is a list of identifiers; ``outcomes_A`` and
    ``outcomes_B`` map setting -> lambda -> +/-1; ``rho`` maps setting ->
    setting -> lambda -> weight, with weights as decimals.
    """
    try:
        lambdas = tuple(str(lam) for lam in data["lambdas"])
        outcomes_a = {(str(setting), str(lam)): int(v)
                      for setting, row in data["outcomes_A"].items()
                      for lam, v in row.items()}
        outcomes_b = {(str(setting), str(lam)): int(v)
                      for setting, row in data["outcomes_B"].items()
                      for lam, v in row.items()}
        rho = {(str(a), str(b)): {str(lam): float(w) for lam, w in row.items()}
               for a, inner in data["rho"].items()
               for b, row in inner.items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ModelError(f"malformed model document: {exc!r}") from exc
    return HiddenVariableModel(lambdas, outcomes_a, outcomes_b, rho)


def model_to_dict(model: HiddenVariableModel) -> dict:
    out_a: dict[str, dict[str, int]] = {}
    for (setting, lam), v in sorted(model.outcomes_a.items()):
        out_a.setdefault(setting, {})[lam] = v
    out_b: dict[str, dict[str, int]] = {}
    for (setting, lam), v in sorted(model.outcomes_b.items()):
        out_b.setdefault(setting, {})[lam] = v
    rho: dict[str, dict[str, dict[str, float]]] = {}
    for (a, b), weights in sorted(model.rho.items()):
        rho.setdefault(a, {})[b] = dict(sorted(weights.items()))
    return {"lambdas": list(model.lambdas), "outcomes_A": out_a,
            "outcomes_B": out_b, "rho": rho}


def load_model(path: str | Path) -> HiddenVariableModel:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelError(f"cannot load model from {path}: {exc}") from exc
    return model_from_dict(data)

"""Stability-boundary search.

Fix every rate but one and scan the free rate for the point where the busy
period stops being defective (``L(0)`` reaches 1).  The defect is exactly
zero on the stable side, so the search bisects on the predicate
``defect > 0`` instead of looking for a sign change.
"""
from dataclasses import dataclass
import math

from .analytic import QueueParams, defect_mass

ARRIVAL = "arrival"
SERVICE = "service"


class BracketError(ValueError):
    """The search interval does not contain a stable/unstable transition."""


@dataclass(frozen=True)
class BoundarySearchSpec:
    free_param: str
    fixed_value: float
    bracket_lo: float
    bracket_hi: float
    tol: float = 1e-9

    def __post_init__(self):
        if self.free_param not in (ARRIVAL, SERVICE):
            raise ValueError(f"free_param must be {ARRIVAL!r} or {SERVICE!r}, got {self.free_param!r}")
        for name in ("fixed_value", "bracket_lo", "bracket_hi", "tol"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not self.bracket_lo < self.bracket_hi:
            raise ValueError(f"need bracket_lo < bracket_hi, got [{self.bracket_lo}, {self.bracket_hi}]")

    def params(self, theta):
        if self.free_param == ARRIVAL:
            return QueueParams(theta, self.fixed_value)
        return QueueParams(self.fixed_value, theta)


@dataclass(frozen=True)
class BoundaryResult:
    value: float
    bracket_width_final: float
    evaluations: int


def bisect_defect(defect, lo, hi, tol, threshold=0.0):
    """Locate where ``defect(theta) > threshold`` switches on within [lo, hi].

    ``defect`` may be any map from the free parameter to a defect mass; the
    transition may run either way.  Returns the midpoint of the final bracket,
    whose width is at most ``2 * tol``.
    """
    evaluations = 2
    lo_on = defect(lo) > threshold
    hi_on = defect(hi) > threshold
    if lo_on == hi_on:
        side = "defective" if lo_on else "proper"
        raise BracketError(f"busy period is {side} at both ends of [{lo}, {hi}]; "
                           "no stability boundary inside the bracket")
    while hi - lo > 2.0 * tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket below float resolution
            break
        evaluations += 1
        if (defect(mid) > threshold) == lo_on:
            lo = mid
        else:
            hi = mid
    return BoundaryResult(0.5 * (lo + hi), hi - lo, evaluations)


def find_stability_boundary(spec, defect=None):
    """Free-rate value at which the M/M/1 busy period becomes defective.

    ``defect`` overrides the closed-form evaluator; it receives the
    :class:`QueueParams` built from the free rate.
    """
    evaluate = defect or defect_mass
    return bisect_defect(lambda theta: evaluate(spec.params(theta)),
                         spec.bracket_lo, spec.bracket_hi, spec.tol)

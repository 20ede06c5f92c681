"""Closed-form busy-period transform of the M/M/1 queue.

The busy period ``B`` started by one customer has Laplace transform

    L(s) = (mu + lam + s - sqrt((mu + lam + s)**2 - 4 lam mu)) / (2 lam)

which is the root in [0, 1] of ``(lam + mu + s) L = mu + lam L**2``.  When
``lam > mu`` the busy period is improper: ``L(0) = mu / lam < 1`` and the
missing mass ``1 - mu / lam`` sits at ``B = inf``.
"""
from dataclasses import dataclass
import math

import numpy as np


def _check_rate(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite rate, got {value!r}")
    return value


def check_s(s):
    """Validate a transform argument (catastrophe rate)."""
    s = float(s)
    if not math.isfinite(s):
        raise ValueError(f"s must be finite, got {s!r}")
    if s < 0.0:
        raise ValueError(f"s must be >= 0, got {s!r}")
    return s


@dataclass(frozen=True)
class QueueParams:
    """Arrival rate ``lam`` and service rate ``mu`` of an M/M/1 queue."""

    lam: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_rate("lambda", self.lam))
        object.__setattr__(self, "mu", _check_rate("mu", self.mu))

    @property
    def rho(self):
        return self.lam / self.mu

    @property
    def stable(self):
        """Busy period is proper (``lam <= mu``)."""
        return self.lam <= self.mu

    def swapped(self):
        return QueueParams(self.mu, self.lam)


@dataclass(frozen=True)
class LtCurve:
    """Samples ``(s, L(s))`` on an increasing grid."""

    s: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.s.shape != self.values.shape or self.s.ndim != 1:
            raise ValueError("s and values must be 1-d arrays of equal length")

    def __len__(self):
        return len(self.s)

    @property
    def points(self):
        return list(zip(self.s.tolist(), self.values.tolist()))


class Infinite:
    """Marker for an infinite expectation.

    Deliberately not convertible to float: callers must branch on it.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"


INFINITE = Infinite()


def _transform(lam, mu, s):
    # Discriminant as a sum of nonnegative terms and the numerator rationalized:
    # both avoid cancellation (near lam == mu, and for s >> lam + mu).
    total = lam + mu + s
    disc = (mu - lam) ** 2 + s * (2.0 * (lam + mu) + s)
    return 2.0 * mu / (total + np.sqrt(disc))


def busy_lt(params, s):
    """Laplace transform of the busy period, ``E[exp(-s B); B < inf]``."""
    s = check_s(s)
    value = float(_transform(params.lam, params.mu, s))
    return min(value, 1.0)


def lt_at_zero(params):
    """``L(0) = P(B < inf) = min(1, mu / lam)``."""
    return min(1.0, params.mu / params.lam)


def defect_mass(params):
    """``P(B = inf) = max(0, 1 - mu / lam)``."""
    return 1.0 - lt_at_zero(params)


def lt_from_level(params, s, i):
    """Transform of the time to empty starting from ``i`` customers.

    Emptying from level ``i`` is ``i`` independent one-level descents, so the
    transform is ``busy_lt(params, s) ** i``.
    """
    if isinstance(i, bool) or int(i) != i or i < 0:
        raise ValueError(f"level must be a nonnegative integer, got {i!r}")
    return busy_lt(params, s) ** int(i)


def lt_curve(params, s_min, s_max, n_points):
    """Evaluate the transform on ``n_points`` evenly spaced ``s`` values."""
    s_min = check_s(s_min)
    s_max = check_s(s_max)
    if not s_min < s_max:
        raise ValueError(f"need s_min < s_max, got [{s_min}, {s_max}]")
    if isinstance(n_points, bool) or int(n_points) != n_points or n_points < 2:
        raise ValueError(f"n_points must be an integer >= 2, got {n_points!r}")
    grid = np.linspace(s_min, s_max, int(n_points))
    values = np.minimum(_transform(params.lam, params.mu, grid), 1.0)
    return LtCurve(grid, values)


def mean_busy_period(params):
    """``E[B]``: ``1 / (mu - lam)`` when stable, else :data:`INFINITE`.

    At ``lam == mu`` the busy period is proper but its mean diverges.
    """
    if params.lam < params.mu:
        return 1.0 / (params.mu - params.lam)
    return INFINITE

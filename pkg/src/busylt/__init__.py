"""Busy-period Laplace transforms of the M/M/1 queue, including the defective
(unstable) case, with branching-process and Monte Carlo cross-checks."""
from .analytic import (
    INFINITE,
    Infinite,
    LtCurve,
    QueueParams,
    busy_lt,
    defect_mass,
    lt_at_zero,
    lt_curve,
    lt_from_level,
    mean_busy_period,
)
from .boundary import BoundarySearchSpec, find_stability_boundary
from .branching import (
    OffspringDist,
    busy_end_probability_via_branching,
    extinction_probability,
    offspring_from_queue,
    pgf,
)

__version__ = "0.1.0"

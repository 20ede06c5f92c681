"""Galton-Watson extinction as an independent route to ``L(0)``.

Each customer in service is replaced either by nothing (service completion,
probability ``mu / (lam + mu)``) or by two customers (arrival, probability
``lam / (lam + mu)``).  The queue empties iff this branching process dies
out, so the extinction probability equals ``P(B < inf)``.
"""
from dataclasses import dataclass
import math

import numpy as np

from ._accel import njit, resolve_backend

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**7
# Tighter than DEFAULT_TOL: the iterate stalls on an exact floating fixed point,
# so the distance to the root stays ~1e-16 / (1 - slope) even near criticality.
QUEUE_TOL = 1e-15


@dataclass(frozen=True)
class OffspringDist:
    """Finite-support offspring pmf ``p_0, ..., p_K``."""

    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise ValueError("offspring distribution needs at least p_0")
        if any(not math.isfinite(p) or p < 0.0 for p in probs):
            raise ValueError(f"probabilities must be finite and >= 0, got {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {math.fsum(probs)!r}")
        if len(probs) > 1 and probs[-1] == 0.0:
            raise ValueError("highest listed offspring count must have positive mass")
        object.__setattr__(self, "probs", probs)

    @property
    def max_offspring(self):
        return len(self.probs) - 1

    def mean(self):
        return math.fsum(k * p for k, p in enumerate(self.probs))

    def as_array(self):
        return np.asarray(self.probs, dtype=np.float64)


@dataclass(frozen=True)
class ExtinctionResult:
    alpha: float
    iterations: int
    converged: bool


def offspring_from_queue(params):
    """Two-atom offspring law of the M/M/1 busy-period branching process."""
    total = params.lam + params.mu
    return OffspringDist((params.mu / total, 0.0, params.lam / total))


@njit(cache=True)
def _horner(probs, z):
    acc = 0.0
    for k in range(probs.shape[0] - 1, -1, -1):
        acc = acc * z + probs[k]
    return acc


@njit(cache=True)
def _iterate(probs, tol, max_iter):
    alpha = 0.0
    for n in range(1, max_iter + 1):
        nxt = _horner(probs, alpha)
        if nxt > 1.0:
            nxt = 1.0
        step = nxt - alpha
        alpha = nxt
        if step <= tol:
            return alpha, n, True
    return alpha, max_iter, False


def pgf(dist, z):
    """``sum_k p_k z**k`` for ``z`` in [0, 1], by Horner's scheme."""
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z!r}")
    acc = 0.0
    for p in reversed(dist.probs):
        acc = acc * z + p
    return acc


def extinction_probability(dist, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                           trace=None, backend=None):
    """Smallest fixed point of the pgf on [0, 1].

    Iterates ``a <- pgf(a)`` from ``a = 0``; the sequence increases to the
    smallest root.  Stops once an increment is ``<= tol``.  If ``max_iter``
    steps pass first, the last iterate is returned with ``converged=False``
    (slow linear convergence near criticality).

    ``trace``, if given, is called with every iterate and forces the
    uncompiled loop (as does ``backend="numpy"``).
    """
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if int(max_iter) < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")
    max_iter = int(max_iter)

    if trace is None and resolve_backend(backend) == "numba":
        alpha, n, ok = _iterate(dist.as_array(), tol, max_iter)
        return ExtinctionResult(float(alpha), int(n), bool(ok))

    alpha = 0.0
    for n in range(1, max_iter + 1):
        nxt = min(pgf(dist, alpha), 1.0)
        if trace is not None:
            trace(nxt)
        step, alpha = nxt - alpha, nxt
        if step <= tol:
            return ExtinctionResult(alpha, n, True)
    return ExtinctionResult(alpha, max_iter, False)


class ConvergenceError(RuntimeError):
    pass


def busy_end_probability_via_branching(params, tol=QUEUE_TOL, max_iter=DEFAULT_MAX_ITER):
    """``P(B < inf)`` computed as the extinction probability of the queue's
    branching process.  Raises :class:`ConvergenceError` if the iteration
    does not settle within ``max_iter`` steps."""
    result = extinction_probability(offspring_from_queue(params), tol, max_iter)
    if not result.converged:
        raise ConvergenceError(
            f"extinction iteration did not converge in {result.iterations} steps "
            f"(lambda={params.lam}, mu={params.mu}); last iterate {result.alpha!r}")
    return result.alpha

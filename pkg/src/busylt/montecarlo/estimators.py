"""Monte Carlo estimates of ``L(s) = P(B < Y)`` with ``Y ~ Exponential(s)``."""
from dataclasses import dataclass
import enum
import math
import warnings

import numpy as np

from .._accel import resolve_backend
from ..analytic import check_s
from . import _kernels, _rng

DEFAULT_MAX_EVENTS = 10**6
DEFAULT_MAX_EVENTS_AT_ZERO = 10**5
Z95 = 1.96
_RACE_BLOCK = 1 << 18


class CensoringWarning(UserWarning):
    """Some trials hit the event cap; ``p_hat`` is biased downward."""


@dataclass(frozen=True)
class WalkStepProbs:
    p_down: float
    p_up: float
    p_cat: float

    def __post_init__(self):
        probs = (self.p_down, self.p_up, self.p_cat)
        if any(p < 0.0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"invalid step probabilities {probs}")


@dataclass(frozen=True)
class SimConfig:
    n_trials: int
    seed: int = 0
    max_events: int | None = None  # None: pick the default for the given s

    def __post_init__(self):
        if int(self.n_trials) < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials!r}")
        if self.max_events is not None and int(self.max_events) < 1:
            raise ValueError(f"max_events must be >= 1, got {self.max_events!r}")
        _rng.check_seed(self.seed)

    def events_cap(self, s):
        if self.max_events is not None:
            return int(self.max_events)
        return DEFAULT_MAX_EVENTS if s > 0.0 else DEFAULT_MAX_EVENTS_AT_ZERO


@dataclass(frozen=True)
class SimEstimate:
    """Binomial estimate of a probability with Wald standard error.

    Censored trials count as failures, so ``p_hat`` can sit below the true
    value by at most ``censoring_bias_bound``.
    """

    p_hat: float
    std_error: float
    ci95_half_width: float
    n_trials: int
    n_censored: int

    @classmethod
    def from_counts(cls, successes, n_trials, n_censored=0):
        successes, n_trials = int(successes), int(n_trials)
        p = successes / n_trials
        se = math.sqrt(p * (1.0 - p) / n_trials)
        return cls(p, se, Z95 * se, n_trials, int(n_censored))

    @property
    def censoring_bias_bound(self):
        return self.n_censored / self.n_trials

    @property
    def biased(self):
        return self.n_censored > 0


class Outcome(enum.Enum):
    FINISHED = "finished"
    CENSORED = "censored"


@dataclass(frozen=True)
class BusyPeriodOutcome:
    tag: Outcome
    duration: float | None  # None when censored
    events: int

    @property
    def finished(self):
        return self.tag is Outcome.FINISHED


@dataclass(frozen=True)
class BusyPeriodSamples:
    """Batch of busy periods; ``durations`` is NaN where censored."""

    finished: np.ndarray
    durations: np.ndarray
    events: np.ndarray

    def __len__(self):
        return len(self.finished)

    @property
    def finished_durations(self):
        return self.durations[self.finished]

    def outcome(self, i):
        if self.finished[i]:
            return BusyPeriodOutcome(Outcome.FINISHED, float(self.durations[i]), int(self.events[i]))
        return BusyPeriodOutcome(Outcome.CENSORED, None, int(self.events[i]))


def embedded_step_probs(params, s):
    """Next-event probabilities of the arrival / completion / catastrophe race."""
    s = check_s(s)
    total = params.lam + params.mu + s
    return WalkStepProbs(params.mu / total, params.lam / total, s / total)


def _summarize(codes, config):
    successes = int(np.count_nonzero(codes == _kernels.SUCCESS))
    censored = int(np.count_nonzero(codes == _kernels.CENSORED))
    return SimEstimate.from_counts(successes, config.n_trials, censored)


def estimate_lt_mc(params, s, config, backend=None):
    """Estimate ``L(s)`` with the embedded jump chain.

    Each trial walks from level 1: down with ``p_down``, up with ``p_up``,
    killed with ``p_cat``.  Success is reaching level 0 first.  Trials still
    alive after the event cap are censored and scored as failures; at
    ``s = 0`` with ``lam >= mu`` this is the only way a trial can fail, and a
    :class:`CensoringWarning` is issued when it happens.
    """
    step = embedded_step_probs(params, s)
    cap = config.events_cap(s)
    seed = _rng.check_seed(config.seed)
    # thresholds computed once so both backends compare against the same floats
    thr_down = step.p_down
    thr_up = step.p_down + step.p_up if step.p_cat > 0.0 else 2.0
    kernel = (_kernels.embedded_walks_nb if resolve_backend(backend) == "numba"
              else _kernels.embedded_walks_np)
    est = _summarize(kernel(seed, int(config.n_trials), thr_down, thr_up, cap), config)
    if est.n_censored and step.p_cat == 0.0:
        warnings.warn(
            f"{est.n_censored} of {est.n_trials} walks hit the {cap}-event cap; "
            f"p_hat is biased low by at most {est.censoring_bias_bound:.3g}",
            CensoringWarning, stacklevel=2)
    return est


def estimate_lt_time_domain(params, s, config, backend=None):
    """Estimate ``L(s)`` by racing a continuous-time busy period against an
    independent ``Exponential(s)`` clock.  Requires ``s > 0``."""
    s = check_s(s)
    if s == 0.0:
        raise ValueError("time-domain estimator needs s > 0 (the catastrophe "
                         "clock never rings at s = 0); use estimate_lt_mc")
    total = params.lam + params.mu
    seed = _rng.check_seed(config.seed)
    kernel = (_kernels.timed_race_nb if resolve_backend(backend) == "numba"
              else _kernels.timed_race_np)
    codes = kernel(seed, int(config.n_trials), total, params.lam / total, s,
                   config.events_cap(s))
    return _summarize(codes, config)


def sample_busy_periods(params, config, backend=None):
    """Simulate ``config.n_trials`` independent busy periods (no catastrophe)."""
    total = params.lam + params.mu
    seed = _rng.check_seed(config.seed)
    kernel = (_kernels.busy_periods_nb if resolve_backend(backend) == "numba"
              else _kernels.busy_periods_np)
    finished, durations, events = kernel(seed, int(config.n_trials), total,
                                         params.lam / total, config.events_cap(0.0))
    return BusyPeriodSamples(finished, durations, events)


def sample_busy_period(params, seed, max_events=DEFAULT_MAX_EVENTS_AT_ZERO):
    """One busy period from a single customer; trial 0 of the ``seed`` stream."""
    batch = sample_busy_periods(params, SimConfig(1, seed, max_events))
    return batch.outcome(0)


def catastrophe_race(sampler, s, config):
    """Estimate ``E[exp(-s X)] = P(X < Y)`` for a user-supplied ``X``.

    ``sampler`` maps an array of independent Uniform[0, 1) draws to
    realizations of ``X`` (inverse-transform style), so each trial's value is
    a pure function of ``(seed, trial index)``.
    """
    s = float(s)
    if not (math.isfinite(s) and s > 0.0):
        raise ValueError(f"s must be positive and finite, got {s!r}")
    seed = _rng.check_seed(config.seed)
    n = int(config.n_trials)
    successes = 0
    for start in range(0, n, _RACE_BLOCK):
        keys = _rng.trial_keys(seed, np.arange(start, min(n, start + _RACE_BLOCK)))
        y = -np.log1p(-_rng.uniforms(keys, 0)) / s
        x = np.asarray(sampler(_rng.uniforms(keys, 1)), dtype=np.float64)
        if x.shape != y.shape:
            raise ValueError(f"sampler returned shape {x.shape}, expected {y.shape}")
        if np.any(x < 0.0) or np.any(np.isnan(x)):
            raise ValueError("sampler produced negative or NaN durations")
        successes += int(np.count_nonzero(x < y))
    return SimEstimate.from_counts(successes, n)


def exponential_sampler(rate):
    rate = float(rate)
    if not (math.isfinite(rate) and rate > 0.0):
        raise ValueError(f"rate must be positive and finite, got {rate!r}")
    return lambda u: -np.log1p(-u) / rate


def degenerate_sampler(value=0.0):
    value = float(value)
    if value < 0.0:
        raise ValueError("durations must be nonnegative")
    return lambda u: np.full_like(u, value)

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from busylt import _accel
from busylt.analytic import QueueParams, busy_lt
from busylt.montecarlo import (
    CensoringWarning,
    Outcome,
    SimConfig,
    SimEstimate,
    WalkStepProbs,
    catastrophe_race,
    degenerate_sampler,
    embedded_step_probs,
    estimate_lt_mc,
    estimate_lt_time_domain,
    exponential_sampler,
    sample_busy_period,
    sample_busy_periods,
)
from busylt.montecarlo import _kernels
from oracles import absorption_dp

MILLION = 10**6


def within(est, target, k=3.0):
    return abs(est.p_hat - target) <= k * est.std_error


@pytest.mark.parametrize("lam,mu,s,expected", [
    (3, 4, 1, (0.5, 0.375, 0.125)),
    (3, 4, 0, (4 / 7, 3 / 7, 0.0)),
    (4, 3, 0, (3 / 7, 4 / 7, 0.0)),
])
def test_embedded_step_probs(lam, mu, s, expected):
    step = embedded_step_probs(QueueParams(lam, mu), s)
    assert (step.p_down, step.p_up, step.p_cat) == pytest.approx(expected, abs=1e-15)


def test_walk_step_probs_validation():
    with pytest.raises(ValueError):
        WalkStepProbs(0.5, 0.6, 0.0)
    with pytest.raises(ValueError):
        WalkStepProbs(-0.1, 0.6, 0.5)


def test_config_validation():
    for bad in (dict(n_trials=0), dict(n_trials=1, max_events=0), dict(n_trials=1, seed=-1),
                dict(n_trials=1, seed=2**64)):
        with pytest.raises(ValueError):
            SimConfig(**bad)
    assert SimConfig(5).events_cap(1.0) == 10**6
    assert SimConfig(5).events_cap(0.0) == 10**5
    assert SimConfig(5, max_events=7).events_cap(0.0) == 7


@given(st.integers(1, 10**7).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_sim_estimate_invariants(counts):
    k, n = counts
    est = SimEstimate.from_counts(k, n, n_censored=n - k)
    assert 0.0 <= est.p_hat <= 1.0
    assert abs(est.std_error - math.sqrt(est.p_hat * (1 - est.p_hat) / n)) <= 1e-12
    assert abs(est.ci95_half_width - 1.96 * est.std_error) <= 1e-12
    assert est.n_censored <= est.n_trials


@pytest.mark.parametrize("lam,mu,target", [(3, 4, 2 / 3), (4, 3, 0.5)])
def test_embedded_estimator(lam, mu, target):
    est = estimate_lt_mc(QueueParams(lam, mu), 1.0, SimConfig(MILLION, seed=42))
    assert est.n_censored == 0
    assert within(est, target)


@pytest.mark.parametrize("lam,mu,target", [(3, 4, 2 / 3), (4, 3, 0.5)])
def test_time_domain_estimator(lam, mu, target):
    est = estimate_lt_time_domain(QueueParams(lam, mu), 1.0, SimConfig(MILLION, seed=7))
    assert within(est, target)


def test_estimators_agree():
    p = QueueParams(4, 3)
    a = estimate_lt_mc(p, 1.0, SimConfig(MILLION, seed=1))
    b = estimate_lt_time_domain(p, 1.0, SimConfig(MILLION, seed=2))
    assert abs(a.p_hat - b.p_hat) <= 3 * math.hypot(a.std_error, b.std_error)


def test_time_domain_rejects_zero():
    with pytest.raises(ValueError):
        estimate_lt_time_domain(QueueParams(3, 4), 0.0, SimConfig(10))


def test_determinism():
    p, cfg = QueueParams(3, 4), SimConfig(200_000, seed=123)
    assert estimate_lt_mc(p, 1.0, cfg) == estimate_lt_mc(p, 1.0, cfg)
    assert estimate_lt_time_domain(p, 1.0, cfg) == estimate_lt_time_domain(p, 1.0, cfg)
    assert estimate_lt_mc(p, 1.0, cfg) != estimate_lt_mc(p, 1.0, SimConfig(200_000, seed=124))


@pytest.mark.parametrize("kernel,args", [
    (_kernels.embedded_walks_nb, (0.5, 0.875, 10**6)),
    (_kernels.timed_race_nb, (7.0, 3 / 7, 1.0, 10**6)),
])
def test_trial_streams_independent_of_batch(kernel, args):
    # trial t's outcome depends only on (seed, t), not on how many trials run
    seed = np.uint64(99)
    small = kernel(seed, 1000, *args)
    large = kernel(seed, 5000, *args)
    assert np.array_equal(small, large[:1000])


def test_busy_period_streams_independent_of_batch():
    p = QueueParams(3, 4)
    big = sample_busy_periods(p, SimConfig(500, seed=5, max_events=10**4))
    one = sample_busy_period(p, seed=5, max_events=10**4)
    assert one.finished == bool(big.finished[0])
    assert one.duration == big.durations[0]
    assert one.events == big.events[0]


def test_censoring_warning_and_bound():
    p = QueueParams(4, 3)
    cfg = SimConfig(20_000, seed=3, max_events=50)
    with pytest.warns(CensoringWarning):
        est = estimate_lt_mc(p, 0.0, cfg)
    assert est.n_censored > 0
    assert est.biased
    assert abs(est.p_hat - busy_lt(p, 0.0)) <= 3 * est.std_error + est.censoring_bias_bound
    # the estimate is low, not high
    assert est.p_hat < busy_lt(p, 0.0)


@pytest.mark.parametrize("lam,mu,s,cap", [(4, 3, 0.0, 10**4), (3, 4, 0.0, 200), (4, 3, 0.3, 20)])
def test_censoring_bound(lam, mu, s, cap):
    p = QueueParams(lam, mu)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringWarning)
        est = estimate_lt_mc(p, s, SimConfig(50_000, seed=11, max_events=cap))
    assert est.n_censored <= est.n_trials
    assert abs(est.p_hat - busy_lt(p, s)) <= 3 * est.std_error + est.censoring_bias_bound


def test_no_warning_when_catastrophe_possible():
    with warnings.catch_warnings():
        warnings.simplefilter("error", CensoringWarning)
        estimate_lt_mc(QueueParams(4, 3), 1.0, SimConfig(10_000, seed=0))


# ------------------------------------------------------------ catastrophe race

def test_race_exponential():
    est = catastrophe_race(exponential_sampler(2.0), 1.0, SimConfig(MILLION, seed=8))
    assert within(est, 2 / 3)


def test_race_degenerate_zero():
    est = catastrophe_race(degenerate_sampler(0.0), 3.0, SimConfig(100_000, seed=8))
    assert est.p_hat == 1.0
    assert est.std_error == 0.0


def test_race_large_s():
    est = catastrophe_race(exponential_sampler(1.0), 99.0, SimConfig(MILLION, seed=9))
    assert within(est, 0.01)


def test_race_scipy_frozen_distribution():
    # any inverse-cdf works as a sampler; gamma(2, scale 1/3) has transform (3/(3+s))^2
    dist = stats.gamma(2, scale=1 / 3)
    est = catastrophe_race(dist.ppf, 1.5, SimConfig(200_000, seed=4))
    assert within(est, (3 / 4.5) ** 2)


def test_race_errors():
    with pytest.raises(ValueError):
        catastrophe_race(exponential_sampler(1.0), 0.0, SimConfig(10))
    with pytest.raises(ValueError):
        catastrophe_race(lambda u: -u, 1.0, SimConfig(10))
    with pytest.raises(ZeroDivisionError):
        catastrophe_race(lambda u: 1 / 0, 1.0, SimConfig(10))


# ---------------------------------------------------------- busy-period samples

def test_sample_busy_period_single():
    out = sample_busy_period(QueueParams(3, 4), seed=1)
    assert out.tag is Outcome.FINISHED
    assert out.duration >= 0.0
    assert 1 <= out.events <= 10**5
    censored = sample_busy_period(QueueParams(50, 1), seed=1, max_events=3)
    assert censored.tag is Outcome.CENSORED
    assert censored.duration is None
    assert censored.events == 3


def test_stable_mean_duration():
    batch = sample_busy_periods(QueueParams(3, 4), SimConfig(10**5, seed=21))
    d = batch.finished_durations
    assert d.size == 10**5
    assert abs(d.mean() - 1.0) <= 3 * d.std(ddof=1) / math.sqrt(d.size)


def test_light_traffic_mean():
    lam, mu = 0.001, 1.0
    batch = sample_busy_periods(QueueParams(lam, mu), SimConfig(10**5, seed=22))
    d = batch.finished_durations
    se = d.std(ddof=1) / math.sqrt(d.size)
    assert abs(d.mean() - 1 / (mu - lam)) <= 3 * se
    # single service dominates: the O(lam) correction is far below the noise
    assert abs(d.mean() - 1 / mu) <= 3 * se + lam * 1.01


def test_events_odd_when_finished():
    # a walk from 1 to 0 takes an odd number of +-1 steps
    batch = sample_busy_periods(QueueParams(3, 4), SimConfig(10_000, seed=2))
    assert np.all(batch.events[batch.finished] % 2 == 1)
    assert np.all(batch.events <= 10**5)


@pytest.mark.slow
def test_conditional_duality_ks():
    n = 10_000
    unstable = sample_busy_periods(QueueParams(4, 3), SimConfig(16_000, seed=31, max_events=10**4))
    stable = sample_busy_periods(QueueParams(3, 4), SimConfig(n, seed=32))
    a = unstable.finished_durations[:n]
    assert a.size == n
    result = stats.ks_2samp(a, stable.finished_durations)
    assert result.pvalue > 0.01


# ------------------------------------------------------------------- oracles

@pytest.mark.parametrize("lam,mu", [(3, 4), (4, 3), (1, 1), (0.5, 6)])
@pytest.mark.parametrize("s", [0.1, 1.0, 5.0])
def test_simulator_matches_dp_oracle(lam, mu, s):
    target = absorption_dp(lam, mu, s)
    est = estimate_lt_mc(QueueParams(lam, mu), s, SimConfig(200_000, seed=int(10 * s) + lam))
    assert within(est, target)


@pytest.mark.slow
@pytest.mark.parametrize("lam,mu,s", [(3, 4, 1.0), (4, 3, 0.5), (2, 2, 0.1)])
def test_estimator_consistency_over_seeds(lam, mu, s):
    p = QueueParams(lam, mu)
    target = busy_lt(p, s)
    hits = 0
    for seed in range(20):
        cfg = SimConfig(MILLION, seed=seed)
        hits += within(estimate_lt_mc(p, s, cfg), target)
        hits += within(estimate_lt_time_domain(p, s, cfg), target)
    assert hits >= math.ceil(0.99 * 40)


# ------------------------------------------------------------------ backends

def test_env_flag(monkeypatch):
    monkeypatch.setenv(_accel.ENV_FLAG, "1")
    assert _accel.resolve_backend() == "numpy"
    monkeypatch.setenv(_accel.ENV_FLAG, "0")
    assert _accel.resolve_backend() == ("numba" if _accel.NUMBA_AVAILABLE else "numpy")
    with pytest.raises(ValueError):
        _accel.resolve_backend("cuda")


@pytest.mark.parametrize("lam,mu,s", [(3, 4, 1.0), (4, 3, 0.2)])
def test_backends_identical_embedded(lam, mu, s):
    p, cfg = QueueParams(lam, mu), SimConfig(50_000, seed=17)
    assert estimate_lt_mc(p, s, cfg, backend="numba") == estimate_lt_mc(p, s, cfg, backend="numpy")


def test_backends_identical_embedded_censored():
    p, cfg = QueueParams(4, 3), SimConfig(2_000, seed=17, max_events=300)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringWarning)
        assert estimate_lt_mc(p, 0.0, cfg, backend="numba") == estimate_lt_mc(p, 0.0, cfg, backend="numpy")


def test_backends_agree_time_domain():
    seed, n = np.uint64(17), 50_000
    a = _kernels.timed_race_nb(seed, n, 7.0, 4 / 7, 1.0, 10**6)
    b = _kernels.timed_race_np(seed, n, 7.0, 4 / 7, 1.0, 10**6)
    # libm log1p may differ by an ulp between backends, flipping exact ties only
    assert np.count_nonzero(a != b) <= 2


def test_backends_agree_busy_periods():
    p, cfg = QueueParams(4, 3), SimConfig(5_000, seed=3, max_events=2_000)
    a = sample_busy_periods(p, cfg, backend="numba")
    b = sample_busy_periods(p, cfg, backend="numpy")
    assert np.array_equal(a.finished, b.finished)
    assert np.array_equal(a.events, b.events)
    np.testing.assert_allclose(a.durations, b.durations, rtol=1e-12, equal_nan=True)


def test_public_entry_respects_env_flag(monkeypatch):
    p, cfg = QueueParams(3, 4), SimConfig(20_000, seed=4)
    compiled = estimate_lt_mc(p, 1.0, cfg)
    monkeypatch.setenv(_accel.ENV_FLAG, "1")
    assert estimate_lt_mc(p, 1.0, cfg) == compiled

"""Trial kernels: a compiled per-trial loop and a lockstep numpy twin.

Both versions consume the counter streams of :mod:`._rng` with the same draw
indices, so they return identical outcomes trial by trial.  Draw layout:

* embedded walk: draw ``j`` decides step ``j`` (down / up / catastrophe).
* time-domain race: draw 0 is the catastrophe clock; event ``j`` uses draw
  ``2j + 1`` for its holding time and ``2j + 2`` for its direction.
* busy-period sample: event ``j`` uses draw ``2j`` for its holding time and
  ``2j + 1`` for its direction.
"""
import numpy as np

from .._accel import njit, prange
from . import _rng
from ._rng import trial_key, uniform

# outcome codes
FAIL = 0
SUCCESS = 1
CENSORED = 2


# ---------------------------------------------------------------- embedded walk

@njit(cache=True, parallel=True)
def embedded_walks_nb(seed, n_trials, thr_down, thr_up, max_events):
    out = np.zeros(n_trials, dtype=np.uint8)
    for t in prange(n_trials):
        key = trial_key(seed, np.uint64(t))
        level = 1
        j = 0
        code = CENSORED
        while j < max_events:
            u = uniform(key, j)
            j += 1
            if u >= thr_up:
                code = FAIL
                break
            # branchless: the up/down choice is a coin flip the CPU cannot predict
            level += 1 - 2 * (u < thr_down)
            if level == 0:
                code = SUCCESS
                break
        out[t] = code
    return out


def embedded_walks_np(seed, n_trials, thr_down, thr_up, max_events):
    out = np.full(n_trials, CENSORED, dtype=np.uint8)
    ids = np.arange(n_trials, dtype=np.int64)
    keys = _rng.trial_keys(seed, ids)
    level = np.ones(n_trials, dtype=np.int64)
    j = 0
    while ids.size and j < max_events:
        u = _rng.uniforms(keys, j)
        j += 1
        down = u < thr_down
        up = ~down & (u < thr_up)
        level += up.astype(np.int64) - down.astype(np.int64)
        hit = level == 0
        cat = ~down & ~up
        out[ids[hit]] = SUCCESS
        out[ids[cat]] = FAIL
        keep = ~(hit | cat)
        ids, keys, level = ids[keep], keys[keep], level[keep]
    return out


# ------------------------------------------------------------ time-domain race

@njit(cache=True, parallel=True)
def timed_race_nb(seed, n_trials, total_rate, p_up, s, max_events):
    out = np.zeros(n_trials, dtype=np.uint8)
    for t in prange(n_trials):
        key = trial_key(seed, np.uint64(t))
        deadline = -np.log1p(-uniform(key, 0)) / s
        clock = 0.0
        level = 1
        code = CENSORED
        for j in range(max_events):
            clock += -np.log1p(-uniform(key, 2 * j + 1)) / total_rate
            if clock >= deadline:
                code = FAIL
                break
            level += 2 * (uniform(key, 2 * j + 2) < p_up) - 1
            if level == 0:
                code = SUCCESS
                break
        out[t] = code
    return out


def timed_race_np(seed, n_trials, total_rate, p_up, s, max_events):
    out = np.full(n_trials, CENSORED, dtype=np.uint8)
    ids = np.arange(n_trials, dtype=np.int64)
    keys = _rng.trial_keys(seed, ids)
    deadline = -np.log1p(-_rng.uniforms(keys, 0)) / s
    clock = np.zeros(n_trials)
    level = np.ones(n_trials, dtype=np.int64)
    j = 0
    while ids.size and j < max_events:
        clock += -np.log1p(-_rng.uniforms(keys, 2 * j + 1)) / total_rate
        late = clock >= deadline
        up = _rng.uniforms(keys, 2 * j + 2) < p_up
        j += 1
        level += np.where(late, 0, np.where(up, 1, -1))
        hit = ~late & (level == 0)
        out[ids[late]] = FAIL
        out[ids[hit]] = SUCCESS
        keep = ~(late | hit)
        ids, keys, deadline = ids[keep], keys[keep], deadline[keep]
        clock, level = clock[keep], level[keep]
    return out


# -------------------------------------------------------- busy-period samples
# Directions are walked first; holding times are only drawn for trials that
# finish.  Draw indices are unchanged, so the result equals an interleaved walk.

@njit(cache=True, parallel=True)
def busy_periods_nb(seed, n_trials, total_rate, p_up, max_events):
    finished = np.zeros(n_trials, dtype=np.bool_)
    durations = np.full(n_trials, np.nan)
    events = np.zeros(n_trials, dtype=np.int64)
    for t in prange(n_trials):
        key = trial_key(seed, np.uint64(t))
        level = 1
        n = 0
        while n < max_events and level > 0:
            level += 2 * (uniform(key, 2 * n + 1) < p_up) - 1
            n += 1
        events[t] = n
        if level == 0:
            finished[t] = True
            acc = 0.0
            for j in range(n):
                acc += -np.log1p(-uniform(key, 2 * j)) / total_rate
            durations[t] = acc
    return finished, durations, events


def busy_periods_np(seed, n_trials, total_rate, p_up, max_events):
    all_keys = _rng.trial_keys(seed, np.arange(n_trials, dtype=np.int64))
    events = np.zeros(n_trials, dtype=np.int64)
    level = np.ones(n_trials, dtype=np.int64)
    ids = np.arange(n_trials, dtype=np.int64)
    keys, lv = all_keys, level.copy()
    n = 0
    while ids.size and n < max_events:
        up = _rng.uniforms(keys, 2 * n + 1) < p_up
        n += 1
        lv += np.where(up, 1, -1)
        done = lv == 0
        events[ids[done]] = n
        level[ids[done]] = 0
        keep = ~done
        ids, keys, lv = ids[keep], keys[keep], lv[keep]
    events[ids] = n
    finished = level == 0

    durations = np.full(n_trials, np.nan)
    ids = np.flatnonzero(finished)
    acc = np.zeros(ids.size)
    keys, need = all_keys[ids], events[ids]
    j = 0
    while ids.size:
        acc += -np.log1p(-_rng.uniforms(keys, 2 * j)) / total_rate
        j += 1
        done = need == j
        durations[ids[done]] = acc[done]
        keep = ~done
        ids, keys, need, acc = ids[keep], keys[keep], need[keep], acc[keep]
    return finished, durations, events

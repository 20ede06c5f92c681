"""Counter-based random streams keyed by (seed, trial index).

Draw ``j`` of trial ``t`` is ``splitmix64_finalizer(key(seed, t) + (j + 1) * GOLDEN)``,
so every uniform is a pure function of (seed, t, j).  The mixing function is
shared between the compiled kernels and the vectorized numpy path, which keeps
the two backends bit-identical wherever only comparisons are involved.
"""
import numpy as np

from .._accel import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


mix64 = njit(cache=True)(_mix64)


@njit(cache=True)
def trial_key(seed, trial):
    return mix64(seed ^ mix64((trial + np.uint64(1)) * GOLDEN))


@njit(cache=True)
def uniform(key, j):
    """Uniform on [0, 1) with 53 random bits."""
    return float(mix64(key + (np.uint64(j) + np.uint64(1)) * GOLDEN) >> _S11) * _INV53


def trial_keys(seed, trials):
    """Vectorized stream keys for an array of trial indices."""
    t = np.asarray(trials, dtype=np.uint64)
    return _mix64(np.uint64(seed) ^ _mix64((t + np.uint64(1)) * GOLDEN))


def uniforms(keys, j):
    """Vectorized draw ``j`` for every key in ``keys``."""
    offset = np.uint64(((int(j) + 1) * int(GOLDEN)) % 2**64)
    z = _mix64(keys + offset)
    return (z >> _S11).astype(np.float64) * _INV53


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.uint64(seed)

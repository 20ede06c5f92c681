"""Numba acceleration switch.

Hot kernels are written once as plain Python over numpy scalars/arrays and
compiled with :func:`njit` when numba is importable.  Setting the environment
variable ``BUSYLT_DISABLE_NUMBA=1`` routes every public entry point to the
pure-numpy fallback instead; the flag is read at call time.
"""
import os

try:
    import numba

    NUMBA_AVAILABLE = True
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        # the system TBB is often too old for numba and warns on first use
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    NUMBA_AVAILABLE = False

ENV_FLAG = "BUSYLT_DISABLE_NUMBA"


def use_numba():
    """True when the compiled kernels should be used."""
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    return NUMBA_AVAILABLE and flag in ("", "0", "false", "no")


def resolve_backend(backend=None):
    if backend is None:
        return "numba" if use_numba() else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def njit(*args, **kwargs):
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


if NUMBA_AVAILABLE:
    prange = numba.prange
else:  # pragma: no cover
    prange = range

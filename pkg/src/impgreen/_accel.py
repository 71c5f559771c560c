"""Backend selection between numba-compiled kernels and the numpy fallback.

Set ``IMPGREEN_NUMBA=0`` in the environment before import to force the pure
numpy code paths. Thread count is taken from ``IMPGREEN_THREADS`` unless set
explicitly through :func:`set_threads`.
"""

from __future__ import annotations

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_FLAG = os.environ.get("IMPGREEN_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _numba is not None and _FLAG not in {"0", "false", "no", "off"}

if NUMBA_ENABLED and "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is often too old; the portable layers are enough here
    _numba.config.THREADING_LAYER = "workqueue"


def njit(*args, **kwargs):
    """Compile with ``numba.njit`` when enabled, otherwise return the function unchanged."""
    if NUMBA_ENABLED:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


prange = _numba.prange if NUMBA_ENABLED else range


def set_threads(n: int | None = None) -> int:
    """Set the number of worker threads used by parallel kernels.

    Parameters
    ----------
    n : int, optional
        Thread count. Falls back to ``IMPGREEN_THREADS`` and then to the
        numba default.

    Returns
    -------
    int
        The thread count in effect (1 for the numpy backend).
    """
    if n is None:
        env = os.environ.get("IMPGREEN_THREADS")
        n = int(env) if env else None
    if not NUMBA_ENABLED:
        return 1
    if n is not None:
        if n < 1:
            raise ValueError("thread count must be positive")
        n = min(n, _numba.config.NUMBA_NUM_THREADS)
        _numba.set_num_threads(n)
    return _numba.get_num_threads()


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"

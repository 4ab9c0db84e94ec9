"""Numba availability and the switch between compiled and fallback kernels.

Set ``ALT_MARK_NUMBA=0`` to force the pure numpy/Python paths even when numba
is importable.  The flag is read once, at import time.
"""
import os

try:
    from numba import njit as _njit
    from numba import types as nb_types
    from numba.typed import Dict as NumbaDict
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    _njit = None
    nb_types = None
    NumbaDict = None
    NUMBA_AVAILABLE = False


def _flag_enabled(value):
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = NUMBA_AVAILABLE and _flag_enabled(os.environ.get("ALT_MARK_NUMBA", "1"))


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is installed, identity otherwise.

    The compiled function is always built when numba is importable so the
    benchmark can compare both paths in one process; ``USE_NUMBA`` only
    decides which one the public dispatchers pick.
    """
    kwargs.setdefault("cache", True)

    def decorator(f):
        if NUMBA_AVAILABLE:
            return _njit(**kwargs)(f)
        return f

    if func is not None:
        return decorator(func)
    return decorator


def backend():
    return "numba" if USE_NUMBA else "numpy"

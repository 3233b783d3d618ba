"""Numba toggle.

The hot inner loops in :mod:`smrmr._kernels` are compiled with numba when it
is importable and the environment variable ``SMRMR_NO_NUMBA`` is unset (or
"0").  Setting ``SMRMR_NO_NUMBA=1`` forces the pure-numpy fallbacks, which
compute identical results.  ``benchmarks/accel_bench.py`` compares the two.
"""

import os


def _numba_enabled() -> bool:
    if os.environ.get("SMRMR_NO_NUMBA", "0") not in ("0", ""):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()

if NUMBA_ENABLED:
    from numba import njit
else:
    def njit(*args, **kwargs):
        def deco(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return deco

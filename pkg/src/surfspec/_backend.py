"""Kernel backend selection.

The per-face accumulation loops are the hot path on large meshes. They are
compiled with numba when it is available; setting SURFSPEC_NUMBA=0 forces
the vectorized numpy fallback, SURFSPEC_NUMBA=1 requires numba and raises
if the import fails. Anything else (or unset) means "use numba if present".
"""

import os

_flag = os.environ.get("SURFSPEC_NUMBA", "auto").strip().lower()

HAS_NUMBA = False
if _flag not in ("0", "false", "off", "no"):
    try:
        import numba  # noqa: F401

        HAS_NUMBA = True
    except ImportError:
        if _flag in ("1", "true", "on", "yes"):
            raise ImportError(
                "SURFSPEC_NUMBA=1 requested but numba is not importable"
            )

USE_NUMBA = HAS_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"

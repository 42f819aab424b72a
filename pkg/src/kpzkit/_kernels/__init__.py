"""Hot-kernel backend selection.

Importing this package binds ``lis_length``, ``lis_length_batch``,
``lpp_fill``, ``png_evolve_steps`` and ``png_origin_height_batch`` to the
compiled Cython module when it is available, and to the pure NumPy/Python
fallback otherwise.  Set KPZKIT_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import fallback

if os.environ.get("KPZKIT_PURE_PYTHON", "") not in ("", "0"):
    _impl = fallback
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = fallback

BACKEND = _impl.BACKEND
lis_length = _impl.lis_length
lis_length_batch = _impl.lis_length_batch
lpp_fill = _impl.lpp_fill
png_evolve_steps = _impl.png_evolve_steps
png_origin_height_batch = _impl.png_origin_height_batch


def backend_info():
    """Name of the active kernel backend ('compiled' or 'python')."""
    return BACKEND


__all__ = [
    "BACKEND",
    "backend_info",
    "fallback",
    "lis_length",
    "lis_length_batch",
    "lpp_fill",
    "png_evolve_steps",
    "png_origin_height_batch",
]

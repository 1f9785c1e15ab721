"""Kernel backend selection.

The distance and gradient inner loops exist twice: a compiled Cython
extension (``simcal._kernels._native``) and a vectorized numpy fallback.
The compiled one is preferred when importable; set ``SIMCAL_BACKEND`` to
``native`` or ``numpy`` to force a choice (``native`` raises if the
extension was not built). ``benchmarks/bench_kernels.py`` compares the
two.
"""

import os

from . import _numpy_impl

_requested = os.environ.get("SIMCAL_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _numpy_impl
elif _requested == "native":
    from . import _native as _impl  # type: ignore[attr-defined]
elif _requested in ("numpy", "python"):
    _impl = _numpy_impl
else:
    raise RuntimeError(
        f"SIMCAL_BACKEND={_requested!r} not recognized; use 'auto', 'native', or 'numpy'"
    )

pairwise_distance = _impl.pairwise_distance
distance_grad = _impl.distance_grad


def backend_name() -> str:
    """Name of the kernel backend in use: 'native' or 'numpy'."""
    return _impl.NAME

"""Float hot loops, compiled when the extension is built.

Set ``RICCATI_PURE_PYTHON=1`` to force the pure-Python implementation.
``BACKEND`` names the one in use.
"""
import os

from . import _pykernels

if os.environ.get("RICCATI_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

iterate_float = _impl.iterate_float
angle_histogram = _impl.angle_histogram


def backends():
    """Every importable implementation, keyed by name (for tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out

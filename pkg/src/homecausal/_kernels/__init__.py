"""Kernel backend selection.

Prefers the compiled extension (``_core``) and falls back to the pure
numpy implementation; both produce bit-identical outputs.  Set
``HOMECAUSAL_KERNELS=python`` to force the fallback.
"""
import os

from . import _pyfallback

if os.environ.get("HOMECAUSAL_KERNELS", "").lower() in {"py", "python", "pure"}:
    _impl = _pyfallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pyfallback
        BACKEND = "python"

sample_records = _impl.sample_records
tabulate_pair = _impl.tabulate_pair


def backend_name() -> str:
    """Which kernel implementation is active: 'cython' or 'python'."""
    return BACKEND

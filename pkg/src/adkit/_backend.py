"""Select the compiled float kernels if the extension was built.

Set ``ADKIT_PURE_PYTHON=1`` to force the pure-Python classes, which are
always used for nested (higher-order) differentiation anyway.
"""
import os

FastDual = None
FastTape = None
NAME = "python"

if os.environ.get("ADKIT_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _core
    except ImportError:  # extension not built
        _core = None
    if _core is not None:
        FastDual = _core.FastDual
        FastTape = _core.FastTape
        NAME = "cython"

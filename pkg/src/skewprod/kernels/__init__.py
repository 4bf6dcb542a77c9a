"""Kernel selection: compiled extension if built, pure Python otherwise.

Set SKEWPROD_PURE=1 to force the pure-Python implementations (used by the
benchmark and by the cross-checking tests).
"""

import os

from . import pure as _pure

if os.environ.get("SKEWPROD_PURE") == "1":
    tc_enumerate = _pure.tc_enumerate
    closure = _pure.closure
    BACKEND = "python"
else:
    try:
        from . import _core as _compiled

        tc_enumerate = _compiled.tc_enumerate
        closure = _compiled.closure
        BACKEND = "cython"
    except ImportError:
        tc_enumerate = _pure.tc_enumerate
        closure = _pure.closure
        BACKEND = "python"

__all__ = ["tc_enumerate", "closure", "BACKEND"]

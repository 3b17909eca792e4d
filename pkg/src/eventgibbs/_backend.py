"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
``EVENTGIBBS_PURE_PYTHON`` environment variable is set to a non-empty value
other than ``0``, the numpy fallback is used. Both expose the same functions.
"""

import os

from . import _pykernels

kernels = _pykernels

if os.environ.get("EVENTGIBBS_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as kernels  # noqa: F811
    except ImportError:
        pass

BACKEND = kernels.BACKEND

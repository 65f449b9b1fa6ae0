"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``ORDERED_GGM_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
ordered_stops = _kernels_py.ordered_stops

if os.environ.get("ORDERED_GGM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        ordered_stops = _compiled.ordered_stops

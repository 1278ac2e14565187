"""Pick the box-kernel implementation at import time.

The compiled extension is used when it was built; setting
``OVPROBE_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

NAME = "python"
kernels = _kernels_py

if not os.environ.get("OVPROBE_PURE_PYTHON"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        NAME = "cython"
    except ImportError:
        pass

import os

import numpy as np
from setuptools import Extension, setup

# OVPROBE_NO_EXT=1 skips the compiled core; the package then runs on the fallback.
if os.environ.get("OVPROBE_NO_EXT"):
    ext_modules = []
else:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ovprobe._kernels",
                ["src/ovprobe/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # no FMA contraction: IoU must match the fallback bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("FIELDCHECK_NO_EXT") != "1":
    openmp = [] if os.environ.get("FIELDCHECK_NO_OPENMP") == "1" else ["-fopenmp"]
    ext_modules = cythonize(
        [
            Extension(
                "fieldcheck._kernel",
                ["src/fieldcheck/_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"] + openmp,
                extra_link_args=openmp,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

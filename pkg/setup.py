"""Build script.

The compiled kernel extension is optional: if Cython or a C compiler is
unavailable the package installs without it and falls back to the pure
numpy kernels at import time.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "freespec._kernels._core",
                sources=["src/freespec/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"freespec: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)

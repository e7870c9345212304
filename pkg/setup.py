"""Build script.

The compiled chain kernel is optional: set PENTASPIN_PURE_PYTHON=1 (or build
without Cython / a C compiler) to skip it, and the package falls back to the
pure-Python kernel at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PENTASPIN_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "pentaspin._chainkernel",
                    ["src/pentaspin/_chainkernel.pyx"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)

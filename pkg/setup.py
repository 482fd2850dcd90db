"""Build script for the optional Cython kernels."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DARBOUX_PURE_PYTHON", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("darboux._ckernels", ["src/darboux/_ckernels.pyx"],
                       include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

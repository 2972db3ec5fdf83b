import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# GCRIT_PURE_PYTHON=1 skips the compiled kernel; gcrit then uses its NumPy fallback.
if cythonize is None or os.environ.get("GCRIT_PURE_PYTHON"):
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("gcrit._shoot", ["src/gcrit/_shoot.pyx"],
                   extra_compile_args=["-O3"],
                   include_dirs=[numpy.get_include()])],
        language_level=3)

setup(ext_modules=ext_modules)

from setuptools import Extension, setup

import numpy

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "padiam._ckernels",
                ["src/padiam/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
else:
    # Source-only install; the package falls back to the pure-Python kernels.
    extensions = []

setup(ext_modules=extensions)

"""Build the optional compiled kernel core.

The extension accelerates the hot modular-arithmetic loops; the package
falls back to the pure numpy implementation in fpbilinear._core_py when
the extension is absent, so a failed compile is not fatal for installs
from source without a toolchain.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fpbilinear._core",
                sources=["src/fpbilinear/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

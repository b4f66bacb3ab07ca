import sys

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "nnadv._kernels._core",
        ["src/nnadv/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    # Pure-python kernels are selected at import time when the compiled
    # module is absent, so the package stays installable without Cython.
    print("Cython unavailable, skipping compiled kernels", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)

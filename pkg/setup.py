"""Build script: compiles the closed-loop kernel extension when Cython and a C
compiler are available; the package falls back to the pure-Python loop otherwise.

    pip install -e . --no-build-isolation
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/quadfts/_fastloop.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    print("Cython not available; building without the compiled kernel")

setup(ext_modules=ext_modules)

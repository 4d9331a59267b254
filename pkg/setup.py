"""Build script for the optional compiled enumeration kernel.

The package is fully functional without the extension; `toposkit._kernels`
falls back to a pure-Python implementation of the same search.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


def extensions():
    if cythonize is None:
        return []
    ext = Extension(
        "toposkit._kernels._csp",
        sources=["src/toposkit/_kernels/_csp.pyx"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions())

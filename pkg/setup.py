"""Build script: compiles the optional statevector kernel extension.

The extension is a pure speedup; if Cython or a C compiler is missing the
build falls back to the numpy kernels with no loss of functionality.
"""

import warnings

from setuptools import setup
from setuptools.errors import CCompilerError, ExecError, PlatformError


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("cython/numpy unavailable at build time; "
                      "installing without the compiled kernel")
        return []
    from setuptools import Extension

    ext = Extension(
        "rivetlite._kernels_cy",
        ["src/rivetlite/_kernels_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


try:
    setup(ext_modules=_extensions())
except (CCompilerError, ExecError, PlatformError):
    warnings.warn("compiled kernel build failed; falling back to pure python")
    setup(ext_modules=[])

"""Build script.

Compiles the min-cost-flow kernel extension when a toolchain is available.
The package falls back to the pure-Python kernel at import time if the
extension is missing, so a failed build is not fatal.
"""

import sys

from setuptools import setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "tampernet.mincost._core",
        ["src/tampernet/mincost/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


try:
    setup(ext_modules=extensions())
except SystemExit:
    raise
except Exception as exc:  # noqa: BLE001 - fall back to pure-Python install
    print(f"extension build failed ({exc}); installing without compiled kernel",
          file=sys.stderr)
    setup(ext_modules=[])

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("NETECC_PURE_PYTHON"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("netecc._ckernels", ["src/netecc/_ckernels.pyx"])
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())

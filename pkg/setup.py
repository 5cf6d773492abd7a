"""Builds the optional Cython core; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("ADKIT_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("adkit._core", ["src/adkit/_core.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

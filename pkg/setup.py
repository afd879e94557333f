import os

from setuptools import Extension, setup

# The compiled sweep kernel is optional: cpwave falls back to the pure-Python
# twin (cpwave._sweep_py) when the extension is absent.  Set CPWAVE_NO_EXT=1
# to skip the build deliberately.
ext_modules = []
if not os.environ.get("CPWAVE_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cpwave._sweep",
                    ["src/cpwave/_sweep.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)

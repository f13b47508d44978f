"""Build script.

The compiled sampling/tabulation kernels are optional: if Cython, numpy
headers, or a C compiler are unavailable the package installs with the
pure-numpy fallback (homecausal._kernels._pyfallback), which produces
bit-identical results.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "homecausal._kernels._core",
                ["src/homecausal/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)

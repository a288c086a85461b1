"""Build script for the optional compiled kernel extension.

The package works without the extension; uplinkrl.nn falls back to the
numpy kernels when the compiled module is absent (see uplinkrl/nn/backend.py).
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    extensions = [
        Extension(
            "uplinkrl.nn._fast",
            sources=["src/uplinkrl/nn/_fast.pyx"],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            optional=True,
        )
    ]
    ext_modules = cythonize(extensions, language_level=3)

setup(ext_modules=ext_modules)

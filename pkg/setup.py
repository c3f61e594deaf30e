import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    # optional=True: a failed compile degrades to the pure-NumPy kernels
    # instead of breaking the install.
    ext_modules = cythonize(
        [
            Extension(
                "driftmap._core",
                ["src/driftmap/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)

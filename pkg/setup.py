"""Build script for the optional compiled kernels.

Without Cython or a C compiler the package still installs and runs on the
NumPy fallback.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "bellsim.ftsim._kernels",
                ["src/bellsim/ftsim/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)

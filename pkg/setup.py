"""Build hook for the optional compiled evaluation kernel.

If Cython or a C compiler is missing the package still installs; the
pure-Python kernel is used instead.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "coordlens._ckernel",
                ["src/coordlens/_ckernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except ImportError:  # pragma: no cover
    pass

setup(ext_modules=ext_modules)

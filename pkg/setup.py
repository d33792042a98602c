import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DICTANOMALY_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dictanomaly._ext._core",
                    ["src/dictanomaly/_ext/_core.pyx"],
                    include_dirs=[np.get_include()],
                    language="c++",
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Cython or numpy missing: the package still works on the fallback.
        ext_modules = []

setup(ext_modules=ext_modules)

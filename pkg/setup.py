import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                f"kreinlab.numkernel.{name}",
                [f"src/kreinlab/numkernel/{name}.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
            for name in ("_jacobi", "_propagate")
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: install the pure-Python fallback only
    extensions = []

setup(ext_modules=extensions)

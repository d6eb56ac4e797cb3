import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The fixed-point kernel is optional: if the toolchain cannot build it,
# credsense.truth falls back to the pure-Python twin at import time.
# -ffp-contract=off keeps the compiled loop bitwise-identical to the pure
# Python twin (no FMA fusion), which the parity test relies on.
ext = Extension(
    "credsense._truth_kernel",
    ["src/credsense/_truth_kernel.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O2", "-ffp-contract=off"],
    optional=True,
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}),
)

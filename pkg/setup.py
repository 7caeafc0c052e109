"""Build script: compiles the optional native kernel extension.

The extension is a performance twin of balancebot._core.pure; the package
works without it. Two flags keep the compiled arithmetic bit-identical to
the pure-Python kernels: -ffp-contract=off (no FMA contraction) and
-fno-builtin-sin/-fno-builtin-cos (stops GCC from fusing adjacent sin/cos
calls into glibc's sincos, which rounds differently on some inputs).
"""

import sys

from setuptools import setup
from setuptools.errors import CCompilerError, ExecError, PlatformError

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "balancebot._core._native",
                ["src/balancebot/_core/_native.pyx"],
                extra_compile_args=[
                    "-O2",
                    "-ffp-contract=off",
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                ],
            )
        ],
        language_level=3,
    )


def run_setup(with_extension):
    setup(ext_modules=ext_modules if with_extension else [])


if __name__ == "__main__":
    try:
        run_setup(bool(ext_modules))
    except (CCompilerError, ExecError, PlatformError):
        sys.stderr.write(
            "warning: native kernel build failed; installing pure-Python only\n"
        )
        run_setup(False)

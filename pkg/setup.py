"""Build script for the optional compiled simulation kernel.

The package is pure Python except for ``mitiplan._mcsim``, a Cython
translation of the Monte Carlo steps-to-block loop.  If Cython or a C
compiler is unavailable the extension is skipped and the package falls
back to ``mitiplan._mcsim_py`` at import time.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-Python kernel on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled simulation kernel not built ({exc}); "
            "the pure-Python fallback will be used",
            file=sys.stderr,
        )


ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("mitiplan._mcsim", ["src/mitiplan/_mcsim.pyx"])],
        language_level=3,
    )
else:
    print(
        "warning: Cython not available; building without the compiled "
        "simulation kernel",
        file=sys.stderr,
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})

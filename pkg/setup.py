import os
import sys

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the compiled kernel when possible; the pure-Python path covers failures."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled NNLS kernel not built ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc})", file=sys.stderr)


ext_modules = []
if os.environ.get("HUNDAL_LAB_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython unavailable, installing pure-Python kernel only", file=sys.stderr)
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "hundal_lab._nnls_ext",
                    ["src/hundal_lab/_nnls_ext.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})

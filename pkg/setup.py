"""Build script for the optional compiled simulation core.

The package is pure Python except for ``citedyn._core``, a Cython kernel for
the hot per-paper trajectory loop.  The kernel links against numpy's
``npyrandom`` static library so that its Poisson draws are bit-identical to
``numpy.random.Generator.poisson`` on the same bit-generator stream; the pure
Python fallback therefore produces exactly the same trajectories, just slower.

If no C compiler is available the build degrades gracefully and the package
installs without the extension.
"""

import os

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise install pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, header mismatch, ...
            print(f"WARNING: compiled core skipped ({exc}); "
                  "citedyn will use the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: building {ext.name} failed ({exc}); "
                  "citedyn will use the pure-Python kernel")


npyrandom_dir = os.path.join(os.path.dirname(numpy.random.__file__), "lib")

extensions = [
    Extension(
        "citedyn._core",
        ["src/citedyn/_core.pyx"],
        include_dirs=[numpy.get_include()],
        library_dirs=[npyrandom_dir],
        libraries=["npyrandom"],
        # -ffp-contract=off: forbid FMA contraction so float arithmetic is
        # bit-identical to the pure-Python kernel (backend equivalence).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError:
    print("WARNING: Cython not available; citedyn will use the pure-Python kernel")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})

"""Build hook: compile the optional convolution kernel when Cython is around.

The package is pure Python by design; the extension only accelerates the
sparse-series product and eorec.series falls back to the Python kernel when
the import fails (eorec.series.KERNEL records which one is live).
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/eorec/_convolve.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"cython unavailable ({exc}); building without the compiled kernel")

setup(ext_modules=ext_modules)

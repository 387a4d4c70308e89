"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python/numpy fallback is
selected at import time), so any build failure here is non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "broucke._kernels_cy",
                ["src/broucke/_kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

# package_dir/packages are duplicated from pyproject.toml on purpose:
# older pips fall back to the legacy develop path, which otherwise drops
# the src layout when placing the built extension.
setup(ext_modules=ext_modules, package_dir={"": "src"}, packages=["broucke"])

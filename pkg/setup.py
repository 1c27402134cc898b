import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback still works without the extension
    ext_modules = []
else:
    compile_args = ["-O3", "-ffast-math", "-fopenmp"]
    if os.environ.get("CCC_RATES_PORTABLE", "") in ("", "0"):
        compile_args.append("-march=native")
    ext_modules = cythonize(
        [
            Extension(
                "ccc_rates._ckernels",
                ["src/ccc_rates/_ckernels.pyx"],
                extra_compile_args=compile_args,
                extra_link_args=["-fopenmp"],
                libraries=["mvec", "m"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)

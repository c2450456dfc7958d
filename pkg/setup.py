from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is used at runtime
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "physioreport.signal_core._iir",
                ["src/physioreport/signal_core/_iir.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)

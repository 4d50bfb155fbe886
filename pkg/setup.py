from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("starunstable._gf2kernel", ["src/starunstable/_gf2kernel.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: the package falls back to the pure-Python kernel
    ext_modules = []

setup(ext_modules=ext_modules)

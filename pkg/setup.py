"""Build hook for the optional compiled clip kernel."""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("coconvex._ddext", ["src/coconvex/_ddext.pyx"], include_dirs=[np.get_include()], optional=True)],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # no Cython: the numpy fallback is used
    pass

setup(ext_modules=ext_modules)

import platform

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # fallback kernels are used at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        "src/agboost/_ckernels.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())
        ext.extra_compile_args.append("-O3")
        if platform.machine() in ("x86_64", "AMD64"):
            ext.extra_compile_args.append("-mpopcnt")
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))

setup(ext_modules=ext_modules)

import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    override = os.environ.get("EIGEN3_INCLUDE_DIR")
    candidates = [override] if override else []
    candidates += ["/usr/include/eigen3", "/usr/local/include/eigen3"]
    for path in candidates:
        if path and os.path.isdir(os.path.join(path, "Eigen")):
            return path
    raise RuntimeError(
        "Eigen headers not found; set EIGEN3_INCLUDE_DIR to the directory "
        "containing Eigen/"
    )


sources = [
    "src/geometry.cpp",
    "src/sparse.cpp",
    "src/assembly.cpp",
    "src/schemes.cpp",
    "src/diagnostics.cpp",
    "src/config.cpp",
    "src/checkpoint.cpp",
    "src/harness.cpp",
    "src/bindings.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "fsikit._fsikit",
            sources=sources,
            include_dirs=["include", eigen_include()],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)

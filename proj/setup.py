import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core_sources = sorted(s for s in glob.glob("src/*.cpp") if not s.endswith("main.cpp"))

ext_modules = [
    Pybind11Extension(
        "dosetc._core",
        core_sources + ["python/bindings.cpp"],
        include_dirs=["include", "vendor"],
        cxx_std=20,
    )
]

setup(ext_modules=ext_modules, cmdclass={"build_ext": build_ext})

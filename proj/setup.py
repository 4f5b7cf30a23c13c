import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Drive the CMake build of qscat._core and drop the module in place."""

    def build_extension(self, ext):
        source = Path(__file__).resolve().parent
        build = Path(self.build_temp).resolve()
        build.mkdir(parents=True, exist_ok=True)
        cfg = [
            "cmake",
            "-S", str(source),
            "-B", str(build),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DQSCAT_BUILD_TESTS=OFF",
            "-DQSCAT_BUILD_CLI=OFF",
            "-DQSCAT_BUILD_PYTHON=ON",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(cfg, check=True)
        subprocess.run(["cmake", "--build", str(build), "--target", "_core",
                        "--parallel"], check=True)
        produced = sorted(build.glob("_core*.so"))
        if not produced:
            raise RuntimeError("cmake build did not produce _core")
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(produced[-1], target)


setup(
    ext_modules=[CMakeExtension("qscat._core")],
    cmdclass={"build_ext": CMakeBuild},
)

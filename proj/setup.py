"""Builds the pybind11 extension through the project's CMake tree.

The canonical build system is CMake; this shim exists so `pip install` (and
`pip install -e . --no-build-isolation`) produce an importable `haargreedy`
package without a separate manual build step. It configures a private CMake
build directory, builds only the `_core` extension target, and copies the
resulting module to wherever setuptools expects it.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "-j"],
            check=True,
        )

        built = sorted((build_dir / "python" / "haargreedy").glob("_core*.so"))
        if not built:
            raise RuntimeError("CMake did not produce the _core extension module")
        target = Path(self.get_ext_fullpath(ext.name)).resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[-1], target)


setup(
    ext_modules=[CMakeExtension("haargreedy._core")],
    cmdclass={"build_ext": CMakeBuild},
)

import shutil
import setuptools
import subprocess


class Cleanup(setuptools.Command):
    """Build the sdist and wheel, then remove the build leftovers."""
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        print("Building...")
        subprocess.run(["python", "setup.py", "sdist", "bdist_wheel"])
        print("\nCleaning up...", end="")
        for path in ("./build", "./sopwork.egg-info", "./.pytest_cache", "./.hypothesis"):
            try:
                shutil.rmtree(path)
            except OSError:
                pass
        print("done.")


setuptools.setup(cmdclass = {"process": Cleanup})

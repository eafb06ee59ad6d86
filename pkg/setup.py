import os
import subprocess
import sys

REQUIRED_PYTHON = (3, 10)
ROOT = os.path.dirname(os.path.abspath(__file__))


def validate_python_version():
    if sys.version_info < REQUIRED_PYTHON:
        wanted = ".".join(map(str, REQUIRED_PYTHON))
        sys.exit(f"coolopt needs Python {wanted} or newer, found {sys.version}")


def install_packages():
    requirements = os.path.join(ROOT, "requirements.txt")
    subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", requirements])


def install_pre_commit_hook():
    subprocess.check_call(["pre-commit", "install"], cwd=ROOT)


def link_src():
    """Registers src/ with the interpreter through a .pth file so that the
    namespace packages import from anywhere."""
    import site

    src = os.path.join(ROOT, "src")
    target = os.path.join(site.getsitepackages()[0], "coolopt.pth")
    with open(target, "w", encoding="UTF-8") as file:
        file.write(src + "\n")


def main():
    validate_python_version()
    install_packages()
    install_pre_commit_hook()
    link_src()
    print("coolopt is set up; run experiments with scripts/coolopt.")


def package():
    """Package manifest for pip; the bare `python setup.py` stays the bootstrap."""
    from setuptools import find_namespace_packages, setup

    setup(
        name="coolopt",
        version="0.1.0",
        python_requires=">=3.10",
        package_dir={"": "src"},
        packages=find_namespace_packages(where="src"),
        py_modules=["main"],
        install_requires=["numpy", "scipy"],
    )


if __name__ == "__main__":
    if len(sys.argv) > 1:
        package()
    else:
        main()

"""
Quickstart for golflab: build .venv, install golflab with its test extras
and run a small exact verification as a smoke test.
"""
import os
import subprocess
import sys

ROOT = os.path.dirname(os.path.abspath(__file__))
VENV = os.path.join(ROOT, ".venv")


def venv_executable(name):
    if os.name == "nt":
        return os.path.join(VENV, "Scripts", f"{name}.exe")
    return os.path.join(VENV, "bin", name)


def call(*args, check=True):
    print("$", *args)
    return subprocess.run(list(args), cwd=ROOT, check=check).returncode


def create_venv():
    if os.path.isdir(VENV):
        print(f"Reusing {VENV}")
        return
    print(f"Creating {VENV}")
    call(sys.executable, "-m", "venv", VENV)


def install_golflab():
    python = venv_executable("python")
    call(python, "-m", "pip", "install", "--upgrade", "pip")
    call(python, "-m", "pip", "install", "-r", "requirements.txt")
    call(python, "-m", "pip", "install", "--no-deps", "-e", ".")


def smoke_test():
    print("Exact suite on cycles up to 5 sites")
    return call(venv_executable("python"), "main.py", "verify", "--max-n", "5", check=False)


def main():
    create_venv()
    install_golflab()
    sys.exit(smoke_test())


if __name__ == "__main__":
    main()

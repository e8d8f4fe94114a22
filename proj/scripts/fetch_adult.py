#!/usr/bin/env python3
"""Fetch the UCI Adult files into data/raw.

Tries the UCI archive first, then falls back to the copy shipped inside the
`responsibly` wheel on PyPI.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

FILES = ("adult.data", "adult.test", "adult.names")
UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/"


def from_uci(dest: pathlib.Path) -> bool:
    try:
        for name in FILES:
            with urllib.request.urlopen(UCI + name, timeout=30) as r:
                (dest / name).write_bytes(r.read())
        return True
    except OSError as e:
        print(f"UCI download failed ({e}); trying PyPI", file=sys.stderr)
        return False


def from_wheel(dest: pathlib.Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "responsibly", "--no-deps", "-q", "-d", tmp],
                       check=True)
        wheel = next(pathlib.Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as z:
            for name in FILES:
                (dest / name).write_bytes(z.read(f"responsibly/dataset/adult/{name}"))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=pathlib.Path(__file__).resolve().parent.parent / "data" / "raw",
                        type=pathlib.Path)
    parser.add_argument("--pypi-only", action="store_true")
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)
    if args.pypi_only or not from_uci(args.dest):
        from_wheel(args.dest)
    for name in FILES:
        print(f"{args.dest / name}: {(args.dest / name).stat().st_size} bytes")


if __name__ == "__main__":
    main()

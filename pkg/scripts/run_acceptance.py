#!/usr/bin/env python3
"""Run the acceptance suite and print only the PASS/FAIL summary lines."""
import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-k", default=None, help="pytest -k expression, e.g. c14")
    ap.add_argument("--full", action="store_true", help="show the full pytest output")
    args = ap.parse_args()
    cmd = [sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    if args.k:
        cmd += ["-k", args.k]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    if args.full:
        print(proc.stdout, proc.stderr, sep="")
    else:
        for line in proc.stdout.splitlines():
            if line.startswith(("PASS ", "FAIL ")):
                print(line)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())

"""
Driving the command line interface
==================================

Every subcommand reads canonical text files (or '-' for stdin) and
prints the same canonical form back, so commands chain through pipes.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

PHI = """\
x1 -> x1 + th[1]*t[1]
x2 -> x2
th1 -> th1
th2 -> th2 + x1*th[1]*t[1,2]
"""


def run(args, text=None):
    proc = subprocess.run(
        [sys.executable, "-m", "superdiff.cli", *args],
        input=text,
        capture_output=True,
        text=True,
    )
    shown = [Path(a).name if "/" in a else a for a in args]
    print(f"$ superdiff {' '.join(shown)}")
    print(proc.stdout, end="")
    print()
    return proc.stdout


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    phi = root / "phi.txt"
    phi.write_text(PHI)
    f = root / "f.txt"
    f.write_text("x1^2\n")

    factored = run(["factorize", str(phi)])
    run(["expand", "-"], factored)
    run(["invert", str(phi)])
    run(["apply", str(phi), str(f)])
    run(["sections", "--m", "1", "--n", "1", "--p", "1", "--degree", "1"])
    run(["selftest", "--seed", "1"])

"""Driving experiments through the command-line runner.

Every study in the other demos can be run from the shell via the
`ecdsim` entry point, which writes CSV tables (with a `#` metadata
header recording the config, seed, RNG, and code version) plus a JSON
mirror. This script invokes the runner as a subprocess and reads the
results back, which is exactly what a plotting pipeline would do.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from ecdsim.cli import read_table

out = Path(tempfile.mkdtemp())


def run(*args):
    cmd = [sys.executable, "-m", "ecdsim", *args]
    print("$", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)


### Closed-form correlators on a log grid, straight to CSV.

run("correlators", "--kind", "c1", "--target", "dsv:gamma=2,zeta=1.4436",
    "--energies", "10:1000:6", "--output", str(out / "c1.csv"))
meta, columns, rows = read_table(out / "c1.csv")
print("columns:", columns)
print("rows:", len(rows), "seed recorded:", meta["seed"])

### Monte Carlo gradient variance with bounds on the same table.

run("variance", "-M", "1", "-L", "4", "--target", "coherent:gamma=1",
    "--energies", "20:200:4", "--samples", "1000", "--seed", "3",
    "--output", str(out / "var.csv"))
meta, columns, rows = read_table(out / "var.csv")
for cells in rows:
    r = dict(zip(columns, cells))
    print(f"  E={r['E']:6.1f} var={r['variance']:.3e} "
          f"bounds [{r['lower_bound']:.3e}, {r['upper_bound']:.3e}]")

### The self-check battery exercises every oracle in seconds.

run("validate")
print("all tables in", out)

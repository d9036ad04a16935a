"""
Planning with sweeps
====================

A sweep re-runs one scenario over a list of values for a single parameter.
Each point is validated on its own, so impossible combinations show up as
rows with an error message instead of stopping the batch.
"""

import tempfile
from pathlib import Path

from geepower import SweepSpec, load_spec, power_curve, run_sweep, write_csv

spec = load_spec(Path(__file__).resolve().parent.parent / "scenarios" / "eudl_parallel.txt")

# Effect sizes on the log-odds scale, from an odds ratio of 0.8 down to 0.6.
rows = run_sweep(SweepSpec(spec, "delta", (-0.223, -0.288, -0.357, -0.431, -0.511)))
print(power_curve(rows))

# How many clusters per arm are needed?  Multiply the allocation.
rows = run_sweep(SweepSpec(spec, "cluster_multiplier", (1, 2, 3)))
print(power_curve(rows))

# A correlation sweep that runs past the admissible range.
rows = run_sweep(SweepSpec(spec, "alpha1", (0.01, 0.05, 1.2)))
print(power_curve(rows))

out = Path(tempfile.mkdtemp()) / "alpha1.csv"
write_csv(rows, out)
print(out.read_text())

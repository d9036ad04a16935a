"""
Incomplete designs and exposure time
====================================

A design pattern cell is 0 (control), 1 (intervention) or 2 (no data).
Here we look at how one row is parsed, what exposure each period gets under
the three intervention-effect models, and what the engine builds from it.
"""

from pathlib import Path

import numpy as np

from geepower import build_design, exposure, load_spec, model_covariance, parse_sequence

# A Connect-Home style row: five control periods, a two-period implementation
# gap, then ten intervention periods and nothing afterwards.
row = [0] * 5 + [2, 2] + [1] * 10 + [2] * 5
sizes = [10 if c != 2 else 0 for c in row]

profile = parse_sequence(row, sizes, effect_type="INC")
print("control span   b0..b1 =", profile.b0, "..", profile.b1)
print("treated span   q0..q1 =", profile.q0, "..", profile.q1)
print("implementation periods c =", profile.c)

# Exposure is counted from the first treated period.  INC keeps growing,
# INC_EX stops at 1 once the active phase (here 4 periods) is over.
for t in profile.observed_periods:
    print(
        f"period {t:2d}  state {profile.state_at(t)}"
        f"  AVE {exposure(profile, t, 'AVE'):.2f}"
        f"  INC {exposure(profile, t, 'INC', q=4):.2f}"
        f"  INC_EX {exposure(profile, t, 'INC_EX', q=4):.2f}"
    )

# The explain view of a small two-sequence trial with implementation periods.
spec = load_spec(Path(__file__).resolve().parent.parent / "scenarios" / "implementation_periods.txt")
for design in build_design(spec):
    p = design.profile
    print(f"sequence {p.seq_index}: periods {list(p.observed_periods)}")
    print(np.column_stack([design.x_rows, design.sizes]))

print("model-based covariance:")
print(np.round(model_covariance(spec), 5))

"""
Reproducing the four worked trials and the parallel-arm appendix
================================================================

Each scenario file under ``scenarios/`` describes one trial in the
``key = value`` format.  Loading it gives a frozen ``TrialSpec``; the engine
turns that into a ``PowerResult`` and ``render`` prints the familiar table.
"""

from pathlib import Path

from geepower import fast_gee_power, load_spec, render

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

# Example 3 is the smallest: five sequences, six periods, two people per
# cluster-period and an exponential-decay correlation.
spec = load_spec(SCENARIOS / "example3_decision_regret.txt")
print(spec.design_pattern)
print("clusters:", spec.n_clusters, " parameters:", spec.n_params, " df:", spec.df)

result = fast_gee_power(spec)
print(render(spec, result))

# The unrounded numbers are on the result object.
print(f"var(delta) = {result.var_delta:.8f}")
print(f"stddel = {result.stddel:.6f}  zpower = {result.zpower:.6f}  tpower = {result.tpower:.6f}")

# The remaining scenarios run the same way.  Example 4 is the heaviest: each
# cluster has 1100 observations, so the engine factors six 1100x1100 matrices.
for name in (
    "example1_connect_home_normal.txt",
    "example2_connect_home_poisson.txt",
    "example4_heart_health_now.txt",
    "eudl_parallel.txt",
):
    spec = load_spec(SCENARIOS / name)
    print(render(spec, fast_gee_power(spec)))

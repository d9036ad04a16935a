from pathlib import Path

import numpy as np
import pytest

from geepower import CorrelationSpec, GeePowerError, OutcomeModel, TrialSpec, model_covariance, validate
from geepower.scenario import load_spec

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

EXAMPLE_FILES = {
    "example1": "example1_connect_home_normal.txt",
    "example2": "example2_connect_home_poisson.txt",
    "example3": "example3_decision_regret.txt",
    "example4": "example4_heart_health_now.txt",
    "eudl": "eudl_parallel.txt",
}

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def scenario_dir():
    return SCENARIOS


@pytest.fixture(scope="session")
def example_specs():
    return {name: load_spec(SCENARIOS / fname) for name, fname in EXAMPLE_FILES.items()}


def random_spec(rng, corr=None, dist=None, max_tries=200):
    """A random small stepped-wedge or parallel spec that passes validation.

    Sizes are constant within each row so cohort structures are allowed too.
    """
    for _ in range(max_tries):
        S = int(rng.integers(2, 5))
        J = int(rng.integers(3, 6))
        steps = np.sort(rng.integers(1, J + 1, size=S))
        dp = np.array([[0] * k + [1] * (J - k) for k in steps])
        if rng.random() < 0.4:
            # knock out an interior cell to make the design incomplete
            s, j = int(rng.integers(S)), int(rng.integers(1, J - 1))
            dp[s, j] = 2
        sizes = np.where(dp == 2, 0, rng.integers(1, 6, size=(S, 1)))
        m = rng.integers(1, 6, size=S)
        d = dist or rng.choice(["BINARY", "POISSON", "NORMAL"])
        phi = 1.0 if d == "BINARY" else float(rng.uniform(0.5, 3.0))
        period = rng.choice(["CAT", "LIN"])
        if d == "BINARY":
            base = float(rng.uniform(-1.5, 0.5))
        elif d == "POISSON":
            base = float(rng.uniform(-0.5, 1.0))
        else:
            base = float(rng.uniform(-2, 2))
        if period == "CAT":
            beta = base + rng.uniform(-0.2, 0.2, size=J)
        else:
            beta = [base, float(rng.uniform(-0.1, 0.1))]
        if corr is None:
            a1 = float(rng.uniform(0.0, 0.2))
            corr_spec = CorrelationSpec("NE", alpha1=a1, alpha2=a1 * float(rng.uniform(0, 1)))
        else:
            corr_spec = corr(rng)
        spec = TrialSpec(
            design_pattern=dp, cp_sizes=sizes, clusters_per_sequence=m,
            outcome=OutcomeModel(d, phi=phi),
            intervention_effect_type="AVE", period_effect_type=period,
            delta=float(rng.uniform(-0.6, 0.6)), beta_period_effects=beta,
            correlation=corr_spec,
        )
        if validate(spec).ok:
            try:
                model_covariance(spec)
            except GeePowerError:
                continue
            return spec
    raise RuntimeError("could not draw a valid spec")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def wls_oracle(spec):
    """phi * [(X'WX)^-1] built from cluster-period cells, AVE designs only."""
    rows, weights = [], []
    S, J = spec.design_pattern.shape
    for s in range(S):
        for j in range(J):
            n = spec.cp_sizes[s, j]
            if spec.design_pattern[s, j] == 2 or n == 0:
                continue
            u = float(spec.design_pattern[s, j])
            if spec.period_effect_type.value == "CAT":
                x = [1.0 if jj == j else 0.0 for jj in range(J)] + [u]
            else:
                x = [1.0, float(j), u]
            rows.append(x)
            weights.append(spec.clusters_per_sequence[s] * n)
    X = np.array(rows)
    W = np.diag(weights).astype(float)
    return spec.outcome.phi * np.linalg.inv(X.T @ W @ X)

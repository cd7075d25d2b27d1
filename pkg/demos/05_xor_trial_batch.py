"""Seeded trial batches: pseudo-Newton against plain gradient descent.

Each method trains 30 XOR networks from seeds 12345..12374 and the
outcome statistics go to CSV, the same artifacts the command line
`holonewt trials` writes. The second-order method should need far fewer
iterations per success.
"""

import tempfile
from pathlib import Path

import numpy as np

from holonewt import Dataset, NetworkTopology
from holonewt.steplength import StepConfig
from holonewt.training import TrainConfig, format_summary, run_trials, write_trials_csv

xor_inputs = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=complex)
xor_targets = np.array([[0], [1], [1], [0]], dtype=complex)
dataset = Dataset(xor_inputs, xor_targets)
topology = NetworkTopology((2, 4, 1), ("taylor3", "taylor3"))

configs = {
    "pseudo_newton": TrainConfig(
        method="pseudo_newton", step=StepConfig(mode="one_step_newton", omega=0.5)
    ),
    "gradient_descent": TrainConfig(
        method="gradient_descent", step=StepConfig(mode="constant", constant_mu=1.0)
    ),
}

means = {}
with tempfile.TemporaryDirectory() as tmp:
    for name, config in configs.items():
        stats, records = run_trials(topology, dataset, config, 30, 12345, jobs=2)
        path = Path(tmp) / f"{name}.csv"
        write_trials_csv(path, records, config, topology)
        means[name] = stats.mean_iterations_over_successes
        print(format_summary(stats, config, topology))
        print(f"first rows of {path.name}:")
        for line in path.read_text().splitlines()[:4]:
            print(f"  {line}")
        print()

speedup = means["gradient_descent"] / means["pseudo_newton"]
print(f"iteration speedup of pseudo-Newton over gradient descent: {speedup:.1f}x")
ok = speedup >= 5.0
print("trial batch comparison:", "PASS" if ok else "FAIL")
raise SystemExit(0 if ok else 1)

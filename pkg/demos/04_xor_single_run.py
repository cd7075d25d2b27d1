"""Train one XOR network with the damped pseudo-Newton method.

Reproduces the benchmark setup: a 2-4-1 network with the cubic Taylor
approximation of the sigmoid, one-step Newton steplength, omega = 0.5,
stopping at E < 1e-3.
"""

import numpy as np

from holonewt import Dataset, NetworkTopology, forward
from holonewt.steplength import StepConfig
from holonewt.training import TrainConfig, train

xor_inputs = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=complex)
xor_targets = np.array([[0], [1], [1], [0]], dtype=complex)
dataset = Dataset(xor_inputs, xor_targets)

topology = NetworkTopology((2, 4, 1), ("taylor3", "taylor3"))
config = TrainConfig(
    method="pseudo_newton",
    step=StepConfig(mode="one_step_newton", omega=0.5),
    error_target=1e-3,
)

record = train(topology, dataset, config, seed=12345)
print(f"outcome: {record.outcome} after {record.iterations} iterations")
print("error trajectory:")
for n, e in enumerate(record.error_history):
    print(f"  iter {n:2d}  E = {e:.6f}")

trace = forward(topology, record.final_weights, dataset.inputs)
print("final outputs (real part should approximate 0,1,1,0):")
for y, d in zip(trace.outputs.ravel(), dataset.targets.ravel()):
    print(f"  y = {y.real:+.3f} {y.imag:+.3f}i   target {d.real:.0f}")

ok = record.outcome == "success"
print("single XOR run:", "PASS" if ok else "FAIL")
raise SystemExit(0 if ok else 1)

"""Walkthrough: topologies, the forward pass and the error function.

Builds a 2-4-1 network with the cubic Taylor sigmoid, pushes the XOR
batch through it, and shows what the trace holds. Finishes with a
checkpoint round trip.
"""

import tempfile
from pathlib import Path

import numpy as np

from holonewt import (
    Dataset,
    NetworkTopology,
    error,
    flat_index,
    forward,
    init_weights,
    load_checkpoint,
    save_checkpoint,
)

xor_inputs = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=complex)
xor_targets = np.array([[0], [1], [1], [0]], dtype=complex)
dataset = Dataset(xor_inputs, xor_targets)

topology = NetworkTopology((2, 4, 1), ("taylor3", "taylor3"))
print(f"widths {topology.widths}, {topology.n_layers} weight layers")
print(f"layer sizes: {[topology.layer_size(p) for p in (1, 2)]} weights")

# weight (j, i) of layer p lives at a deterministic flat position
print("flat index of layer 1, node 3, input 2:", flat_index(topology, 1, 3, 2))

weights = init_weights(topology, seed=7)
trace = forward(topology, weights, dataset.inputs)
print("\nper-layer activation shapes:", [v.shape for v in trace.values])
print("net sums at the output layer:")
print(np.array2string(trace.nets[-1].ravel(), precision=4))
print("outputs vs targets:")
for y, d in zip(trace.outputs.ravel(), dataset.targets.ravel()):
    print(f"  y = {y:+.4f}   d = {d:+.1f}")

e = error(topology, weights, dataset)
print(f"\nmean squared error E = {e:.6f}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "weights.json"
    save_checkpoint(path, topology, weights)
    topo2, weights2 = load_checkpoint(path)
    same = all(np.array_equal(a, b) for a, b in zip(weights, weights2))
    e2 = error(topo2, weights2, dataset)

ok = same and e2 == e
print("checkpoint round trip:", "PASS" if ok else "FAIL")
raise SystemExit(0 if ok else 1)

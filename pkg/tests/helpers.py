"""Shared instance generators for the test suite.

Random instances draw every real and imaginary part i.i.d. uniform in
[-1, 1].  Sigmoid instances are redrawn (deterministically, by bumping
the seed) until every net sum in the forward trace keeps a safe distance
from the sigmoid poles, so finite-difference probes stay finite.
"""

import numpy as np

from holonewt import Dataset, NetworkTopology, forward
from holonewt.activations import distance_to_sigmoid_poles


def complex_uniform(rng, shape):
    draws = rng.uniform(-1.0, 1.0, size=shape + (2,))
    return draws[..., 0] + 1j * draws[..., 1]


def random_instance(widths, activation, seed, n_samples=3, pole_margin=0.5):
    """(topology, weights, dataset) with unit-box entries, pole-filtered."""
    topology = NetworkTopology(tuple(widths), (activation,) * (len(widths) - 1))
    for attempt in range(64):
        rng = np.random.Generator(np.random.PCG64(seed + 1_000_000 * attempt))
        weights = [
            complex_uniform(rng, (widths[p], widths[p - 1]))
            for p in range(1, len(widths))
        ]
        dataset = Dataset(
            complex_uniform(rng, (n_samples, widths[0])),
            complex_uniform(rng, (n_samples, widths[-1])),
        )
        if activation != "sigmoid":
            return topology, weights, dataset
        trace = forward(topology, weights, dataset.inputs)
        if min(distance_to_sigmoid_poles(n).min() for n in trace.nets) >= pole_margin:
            return topology, weights, dataset
    raise RuntimeError(f"no pole-safe instance for seed {seed}")

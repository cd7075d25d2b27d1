"""Holomorphic activation functions and their first two derivatives.

Each activation is entire or meromorphic on C and is applied elementwise
to complex net sums.  All of them have real Taylor coefficients, so
g(conj(z)) == conj(g(z)); the backpropagation recursions rely on that
symmetry.  Non-finite values (e.g. the sigmoid evaluated at a pole) are
returned as-is rather than masked.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["Activation", "ACTIVATIONS", "get_activation", "distance_to_sigmoid_poles"]


@dataclass(frozen=True)
class Activation:
    name: str
    f: Callable
    d1: Callable
    d2: Callable


def _as_complex(z):
    # keep wider complex dtypes (the FD oracle probes in extended precision)
    z = np.asarray(z)
    if not np.issubdtype(z.dtype, np.complexfloating):
        z = z.astype(complex)
    return z


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-_as_complex(z)))


def _sigmoid_d1(z):
    g = _sigmoid(z)
    return g * (1.0 - g)


def _sigmoid_d2(z):
    g = _sigmoid(z)
    return g * (1.0 - g) * (1.0 - 2.0 * g)


def _taylor3(z):
    z = _as_complex(z)
    return 0.5 + z / 4.0 - z**3 / 48.0


def _taylor3_d1(z):
    z = _as_complex(z)
    return 0.25 - z**2 / 16.0


def _taylor3_d2(z):
    return -_as_complex(z) / 8.0


def _identity(z):
    return _as_complex(z)


def _one(z):
    return np.ones_like(_as_complex(z))


def _zero(z):
    return np.zeros_like(_as_complex(z))


ACTIVATIONS = {
    "sigmoid": Activation("sigmoid", _sigmoid, _sigmoid_d1, _sigmoid_d2),
    # cubic Taylor truncation of the sigmoid about 0
    "taylor3": Activation("taylor3", _taylor3, _taylor3_d1, _taylor3_d2),
    "identity": Activation("identity", _identity, _one, _zero),
}


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise KeyError(
            f"unknown activation {name!r}, expected one of {sorted(ACTIVATIONS)}"
        ) from None


def distance_to_sigmoid_poles(z):
    """Distance from each point to the nearest sigmoid pole i*pi*(2k+1)."""
    z = np.asarray(z, dtype=complex)
    k = np.round((z.imag / np.pi - 1.0) / 2.0)
    best = np.full(z.shape, np.inf)
    for kk in (k - 1, k, k + 1):
        best = np.minimum(best, np.abs(z - 1j * np.pi * (2.0 * kk + 1.0)))
    return best

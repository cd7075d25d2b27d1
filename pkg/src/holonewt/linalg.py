"""Dense complex linear algebra helpers.

Matrices and vectors are plain numpy arrays with dtype complex128.  The
solver is Gaussian elimination with partial pivoting; it is written out
here (rather than delegated to numpy.linalg) because the training code
needs a well-defined singularity signal with an explicit threshold.
"""

import numpy as np

__all__ = ["SingularMatrix", "solve", "conj_transpose", "elementwise_conj"]

# Pivot magnitudes below PIVOT_RTOL times the largest entry of the input
# matrix are treated as exact zeros.
PIVOT_RTOL = 1e-12


class SingularMatrix(Exception):
    """Raised when elimination hits a pivot too small to trust."""


def conj_transpose(a):
    """Conjugate transpose of a 2-d array."""
    return np.conj(np.asarray(a)).T


def elementwise_conj(v):
    """Elementwise complex conjugate."""
    return np.conj(np.asarray(v))


def solve(a, b):
    """Solve a @ x = b by Gaussian elimination with partial pivoting.

    `b` may be a vector or a matrix of stacked right-hand sides.  Raises
    SingularMatrix when any pivot magnitude falls below PIVOT_RTOL times
    the largest entry magnitude of the original matrix.  The input arrays
    are not modified.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    b = np.array(b, dtype=complex)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.shape[0] != n:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has {n}")

    scale = np.max(np.abs(a)) if n else 0.0
    if scale == 0.0:
        raise SingularMatrix("matrix of zeros")
    threshold = PIVOT_RTOL * scale

    for k in range(n):
        p = k + np.argmax(np.abs(a[k:, k]))
        if not abs(a[p, k]) >= threshold:
            raise SingularMatrix(f"pivot {abs(a[p, k]):.3e} below {threshold:.3e}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= factors[:, None] * a[k, k:]
        b[k + 1 :] -= factors[:, None] * b[k]

    x = np.empty_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]

    return x[:, 0] if vector_rhs else x

"""Cyclic Jacobi eigensolver for small real symmetric matrices."""

from __future__ import annotations

import numpy as np


def jacobi_eigh(matrix, tol: float = 1e-15, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors (as columns) of a symmetric matrix.

    Rotations are applied in row-major cyclic order until the off-diagonal
    mass falls below ``tol`` times the Frobenius norm, so the result is a
    deterministic function of the input bits.
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    vectors = np.eye(n)
    scale = np.linalg.norm(a) or 1.0
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                vectors = vectors @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(a).copy(), vectors

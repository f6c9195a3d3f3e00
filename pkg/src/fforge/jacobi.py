"""Cyclic Jacobi eigensolver for dense real symmetric matrices.

Rotations are applied in fixed row-major (p, q) order with no pivoting or
randomisation, so identical input gives bitwise identical output.  The
kernels are compiled with numba; ``jacobi_eigh_batch`` runs a stack of
same-order matrices through the same kernel for the census.
"""

from __future__ import annotations

import numba
import numpy as np

from .errors import ConvergenceFailure

MAX_SWEEPS = 60
# sweeps stop once the off-diagonal Frobenius mass is below REL_OFF * ||A||_F
REL_OFF = 1e-15


@numba.njit(cache=True)
def _jacobi_inplace(a, v, max_sweeps, rel_off):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j] * a[i, j]
    if total == 0.0:
        return 0
    target = rel_off * np.sqrt(total)
    for sweep in range(1, max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= target:
            return sweep - 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                # once a[p,q] is negligible against both diagonal entries, drop it
                if sweep > 3 and abs(app) + 100.0 * abs(apq) == abs(app) \
                        and abs(aqq) + 100.0 * abs(apq) == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    nrp = arp - s * (arq + tau * arp)
                    nrq = arq + s * (arp - tau * arq)
                    a[r, p] = nrp
                    a[p, r] = nrp
                    a[r, q] = nrq
                    a[q, r] = nrq
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = vrp - s * (vrq + tau * vrp)
                    v[r, q] = vrq + s * (vrp - tau * vrq)
    return -1


@numba.njit(cache=True)
def _jacobi_batch(stack, values, vectors, max_sweeps, rel_off):
    bad = -1
    work = np.empty_like(stack[0])
    for b in range(stack.shape[0]):
        work[:, :] = stack[b]
        if _jacobi_inplace(work, vectors[b], max_sweeps, rel_off) < 0:
            bad = b
            break
        for i in range(work.shape[0]):
            values[b, i] = work[i, i]
    return bad


def _sorted(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, axis=-1, kind="stable")
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    return values, vectors


def jacobi_eigh(mat, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of one symmetric matrix.

    Returns ascending eigenvalues and a matrix whose columns are the
    matching orthonormal eigenvectors.
    """
    a = np.array(mat, dtype=np.float64, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.empty_like(a)
    if _jacobi_inplace(a, v, max_sweeps, REL_OFF) < 0:
        raise ConvergenceFailure(f"Jacobi did not converge within {max_sweeps} sweeps")
    return _sorted(np.diag(a).copy(), v)


def jacobi_eigh_batch(stack, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """``jacobi_eigh`` over a ``(B, n, n)`` stack; returns ``(B, n)`` and ``(B, n, n)``."""
    stack = np.ascontiguousarray(stack, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a (B, n, n) stack, got shape {stack.shape}")
    values = np.empty(stack.shape[:2])
    vectors = np.empty_like(stack)
    if len(stack) == 0:
        return values, vectors
    bad = _jacobi_batch(stack, values, vectors, max_sweeps, REL_OFF)
    if bad >= 0:
        raise ConvergenceFailure(f"Jacobi did not converge for batch item {bad}")
    return _sorted(values, vectors)

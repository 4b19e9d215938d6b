"""Shared oracles for the test suite.

The eigensolver here is deliberately independent of numpy.linalg: a
cyclic complex Jacobi iteration whose correctness rests only on
similarity invariance and off-diagonal convergence, so it can audit
routines that are themselves built on LAPACK.
"""

import numpy as np
import pytest

from qrandlab.sampler import SeededStream


def jacobi_eigenvalues(h: np.ndarray, max_sweeps: int = 200, tol: float = 1e-13) -> np.ndarray:
    """Spectrum of a Hermitian matrix by cyclic 2x2 Jacobi rotations."""
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real])
    for _ in range(max_sweeps):
        off = max(abs(a[p, q]) for p in range(n) for q in range(n) if p != q)
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < tol:
                    continue
                phase = apq / abs(apq)
                tau = (a[q, q].real - a[p, p].real) / (2 * abs(apq))
                t = 1.0 if tau == 0 else np.sign(tau) / (abs(tau) + np.hypot(1, tau))
                c = 1 / np.hypot(1, t)
                s = t * c
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s * phase
                rot[q, p] = -s * np.conj(phase)
                a = rot.conj().T @ a @ rot
    return np.sort(np.real(np.diag(a)))


def naive_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise quadruple-loop Kronecker product."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for m in range(cb):
                    out[i * rb + k, j * cb + m] = a[i, j] * b[k, m]
    return out


def partial_trace_4index(rho: np.ndarray, dim_a: int, dim_b: int, trace_out: str) -> np.ndarray:
    """Explicit index-summation partial trace."""
    keep = dim_a if trace_out == "B" else dim_b
    out = np.zeros((keep, keep), dtype=complex)
    for i in range(keep):
        for j in range(keep):
            acc = 0.0 + 0.0j
            if trace_out == "B":
                for b in range(dim_b):
                    acc += rho[i * dim_b + b, j * dim_b + b]
            else:
                for a in range(dim_a):
                    acc += rho[a * dim_b + i, a * dim_b + j]
            out[i, j] = acc
    return out


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def stream() -> SeededStream:
    return SeededStream(1234)

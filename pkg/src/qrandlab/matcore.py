"""Dense complex linear algebra and entropy primitives.

Everything operates on plain ``numpy`` arrays: operators are square
``complex128`` matrices, pure states are unit vectors.  All entropies are
in bits.  Operators assembled by arithmetic are re-symmetrized before
eigendecomposition to suppress round-off drift.
"""

from __future__ import annotations

import numpy as np

# Validation tolerances for states and operators.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
PURE_NORM_TOL = 1e-12

# Relative eigenvalue threshold below which a PSD operator is treated as
# having no support.  Operator sums of few projectors are genuinely
# rank-deficient, so support detection has to be explicit.
SUPPORT_CUTOFF = 1e-10

# Probabilities below this are treated as exact zeros inside entropies.
PROB_FLOOR = 1e-15

LN2 = np.log(2.0)


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    """Average an almost-Hermitian matrix with its adjoint."""
    return (m + dag(m)) / 2


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of ``m`` from its adjoint."""
    return float(np.max(np.abs(m - dag(m)))) if m.size else 0.0


def _require_square(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} requires a square matrix, got shape {m.shape}")
    return m


def check_pure_state(psi: np.ndarray, tol: float = PURE_NORM_TOL) -> np.ndarray:
    """Validate a pure state vector (unit Euclidean norm within ``tol``)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"pure state must be a vector, got shape {psi.shape}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"pure state norm {nrm} deviates from 1 by more than {tol}")
    return psi


def check_density_operator(rho: np.ndarray) -> np.ndarray:
    """Validate a density operator.

    Checks Hermiticity (max-entry deviation), unit trace and eigenvalue
    positivity against the module tolerances.  Returns the input array
    unchanged so the call can be chained.
    """
    rho = _require_square(rho, "density operator")
    if not np.all(np.isfinite(rho.view(float))):
        raise ValueError("density operator contains non-finite entries")
    defect = hermiticity_defect(rho)
    if defect > HERMITICITY_TOL:
        raise ValueError(f"density operator not Hermitian: defect {defect:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density operator trace {tr} deviates from 1")
    lo = float(np.min(np.linalg.eigvalsh(hermitize(rho))))
    if lo < EIGENVALUE_FLOOR:
        raise ValueError(f"density operator has eigenvalue {lo:.3e} below floor")
    return rho


def projector(psi: np.ndarray) -> np.ndarray:
    """Rank-1 density operator of a pure state."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a square matrix.

    For Hermitian input this equals the sum of absolute eigenvalues.
    """
    m = _require_square(m, "trace_norm")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def operator_norm(m: np.ndarray, tol: float = 1e-9) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix.

    Raises ``ValueError`` when the input deviates from Hermitian by more
    than ``tol`` (max-entry).
    """
    m = _require_square(m, "operator_norm")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"operator_norm requires Hermitian input, defect {defect:.3e}")
    if np.max(np.abs(m)) == 0.0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(hermitize(m)))))


def pure_trace_distance(phi: np.ndarray, psi: np.ndarray) -> float:
    """Trace norm of the difference of two pure-state projectors.

    Uses the closed form 2*sqrt(1 - |<phi|psi>|^2); the difference of two
    rank-1 projectors has eigenvalues +/- sqrt(1 - |overlap|^2).
    """
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if phi.shape != psi.shape:
        raise ValueError(f"dimension mismatch: {phi.shape} vs {psi.shape}")
    overlap = abs(np.vdot(phi, psi)) ** 2
    return 2.0 * np.sqrt(max(0.0, 1.0 - overlap))


def partial_trace(rho: np.ndarray, dim_a: int, dim_b: int, trace_out: str) -> np.ndarray:
    """Reduced operator after tracing out one factor of ``A (x) B``.

    ``trace_out`` is ``"A"`` or ``"B"``; the result lives on the other
    factor.  The bipartition uses the Kronecker convention with the A
    index major.
    """
    rho = _require_square(rho, "partial_trace")
    if dim_a * dim_b != rho.shape[0]:
        raise ValueError(
            f"declared factorization {dim_a}x{dim_b} does not match dim {rho.shape[0]}"
        )
    four = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    if trace_out == "B":
        return np.einsum("ibjb->ij", four)
    if trace_out == "A":
        return np.einsum("aiaj->ij", four)
    raise ValueError(f"trace_out must be 'A' or 'B', got {trace_out!r}")


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor's index major."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def support_projector(m: np.ndarray, rel_cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Projector onto the eigenspaces of a Hermitian PSD matrix above cutoff."""
    m = _require_square(m, "support_projector")
    w, v = np.linalg.eigh(hermitize(m))
    keep = w > rel_cutoff * max(float(w[-1]), 0.0)
    vk = v[:, keep]
    return vk @ dag(vk)


def hermitian_inv_sqrt(m: np.ndarray, rel_cutoff: float = SUPPORT_CUTOFF, tol: float = 1e-9) -> np.ndarray:
    """Inverse square root of a Hermitian PSD matrix on its support.

    Eigenvalues above ``rel_cutoff`` times the largest one are inverted
    and square-rooted; the rest are treated as null space and mapped to
    zero, so ``X M X`` reproduces the support projector of ``M``.
    """
    m = _require_square(m, "hermitian_inv_sqrt")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"hermitian_inv_sqrt requires Hermitian input, defect {defect:.3e}")
    w, v = np.linalg.eigh(hermitize(m))
    top = max(float(w[-1]), 0.0)
    inv = np.zeros_like(w)
    keep = w > rel_cutoff * top
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ dag(v)


def shannon_entropy(p: np.ndarray, sum_tol: float = 1e-9) -> float:
    """Entropy of a probability vector in bits, with 0 log 0 = 0.

    Entries may dip to -1e-12 from round-off and are clamped into [0, 1];
    larger negative mass raises.  The vector must sum to 1 within
    ``sum_tol``.
    """
    p = np.asarray(p, dtype=float)
    if p.size and float(np.min(p)) < -1e-12:
        raise ValueError(f"negative probability mass {float(np.min(p)):.3e}")
    total = float(np.sum(p))
    if abs(total - 1.0) > sum_tol:
        raise ValueError(f"probabilities sum to {total}, expected 1")
    q = np.clip(p, 0.0, 1.0)
    q = q[q > PROB_FLOOR]
    return float(-(q * np.log2(q)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy of a density operator's spectrum in bits."""
    rho = check_density_operator(rho)
    w = np.linalg.eigvalsh(hermitize(rho))
    return shannon_entropy(np.clip(w, 0.0, 1.0), sum_tol=1e-8)

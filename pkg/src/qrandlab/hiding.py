"""Bipartite subspace hiding with transpose-channel decoding.

States on a p-dimensional subspace of a d x d bipartite space are
scrambled by a keyed unitary so that product measurements see almost
nothing, while a collective decoder built from the ensemble average
N = sum_i U_i P U_i^dag recovers them: its Kraus elements are
P U_i^dag N^(-1/2), the transpose channel of the encoding, and they
simultaneously realize the square-root measurement that discriminates
the carrier subspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import RATE_FLOOR_CONSTANT
from .matcore import (
    check_density_operator,
    check_pure_state,
    dag,
    hermitian_inv_sqrt,
    hermitize,
    projector,
    support_projector,
)
from .randomizer import RandomizingMap, apply_map_pure
from .sampler import SeededStream, build_ensemble, haar_unitary


@dataclass(frozen=True)
class HidingScheme:
    """Subspace embedding, keyed scrambling unitaries, and decoder data.

    ``basis`` holds p orthonormal columns spanning the carrier subspace
    of the D = d*d dimensional joint space; ``projector_s`` is the rank-p
    projector onto it.  ``n_matrix`` is the unnormalized ensemble average
    of the conjugated projectors and ``n_inv_sqrt`` its inverse square
    root on its support.
    """

    d: int
    p: int
    n: int
    basis: np.ndarray          # (D, p)
    projector_s: np.ndarray    # (D, D)
    rmap: RandomizingMap
    n_matrix: np.ndarray       # (D, D)
    n_inv_sqrt: np.ndarray     # (D, D)
    n_support: np.ndarray      # (D, D)

    @property
    def total_dim(self) -> int:
        return self.d * self.d


def build_scheme(d: int, p: int, n: int, stream: SeededStream, kind: str = "haar") -> HidingScheme:
    """Construct a hiding scheme on the d x d joint space.

    The carrier subspace is the span of the first p computational basis
    vectors conjugated by one fresh uniform unitary, so it is in generic
    position.  ``kind`` selects the scrambling ensemble; ``weyl`` with
    n = (d^2)^2 gives the exactly uniformizing baseline.
    """
    if p > d:
        raise ValueError("hidden dimension is restricted to p <= d")
    total = d * d
    # decodability needs n*p well below (d^2)^2; the exactly uniformizing
    # weyl baseline saturates the space on purpose and gives up decoding
    if kind == "haar" and n * p > total * total:
        raise ValueError("guard: n*p must not exceed (d^2)^2")
    rotation = haar_unitary(total, stream.child(0))
    basis = rotation[:, :p]
    proj = basis @ dag(basis)
    ensemble = build_ensemble(total, n, kind, stream.child(1))
    rmap = RandomizingMap(ensemble)
    n_matrix = np.zeros((total, total), dtype=complex)
    for block in ensemble.iter_batches():
        rotated = block @ proj
        n_matrix += np.matmul(rotated, block.conj().transpose(0, 2, 1)).sum(axis=0)
    n_matrix = hermitize(n_matrix)
    n_inv_sqrt = hermitian_inv_sqrt(n_matrix)
    n_support = support_projector(n_matrix)
    # the failure direction I - support must be positive for the decoder
    lo = float(np.min(np.linalg.eigvalsh(hermitize(np.eye(total) - n_support))))
    if lo < -1e-9:
        raise RuntimeError(f"decoder completion not PSD: min eigenvalue {lo:.3e}")
    return HidingScheme(
        d=d,
        p=p,
        n=n,
        basis=basis,
        projector_s=proj,
        rmap=rmap,
        n_matrix=n_matrix,
        n_inv_sqrt=n_inv_sqrt,
        n_support=n_support,
    )


def embed(scheme: HidingScheme, phi: np.ndarray) -> np.ndarray:
    """Lift a p-dimensional pure state into the carrier subspace."""
    phi = check_pure_state(np.asarray(phi, dtype=complex))
    if phi.shape[0] != scheme.p:
        raise ValueError(f"hidden state dim {phi.shape[0]} != p={scheme.p}")
    return scheme.basis @ phi


def encode(scheme: HidingScheme, phi: np.ndarray, key: int | None = None) -> np.ndarray:
    """Embed and scramble a hidden state.

    With a key, returns the pure keyed share U_key phi phi^dag U_key^dag.
    Without one, returns the key-averaged output, which is what parties
    holding no key can ever see.
    """
    lifted = embed(scheme, phi)
    if key is None:
        return apply_map_pure(scheme.rmap, lifted)
    if not (0 <= key < scheme.n):
        raise ValueError(f"key {key} out of range [0, {scheme.n})")
    u = scheme.rmap.ensemble.member(key)
    return projector(u @ lifted)


def decoder_kraus(scheme: HidingScheme) -> tuple[list[np.ndarray], np.ndarray]:
    """Success Kraus elements P U_i^dag N^(-1/2) plus the failure element.

    The success elements alone resolve the identity only on the support
    of N; the failure element sqrt(I - support) completes the channel.
    """
    ops = [
        scheme.projector_s @ dag(scheme.rmap.ensemble.member(i)) @ scheme.n_inv_sqrt
        for i in range(scheme.n)
    ]
    failure_sq = hermitize(np.eye(scheme.total_dim) - scheme.n_support)
    w, v = np.linalg.eigh(failure_sq)
    if float(np.min(w)) < -1e-9:
        raise RuntimeError("decoder completion not PSD")
    failure = (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)
    return ops, failure


@dataclass(frozen=True)
class DecoderOutcome:
    """Recovered hidden state plus the probability of each decoder branch.

    ``branch_probabilities`` has one entry per ensemble index and a final
    failure entry; the recovered state mixes the per-branch outputs,
    mirroring a decoder that records which branch fired.
    """

    recovered: np.ndarray             # (p, p)
    branch_probabilities: np.ndarray  # (n + 1,)


def decode(scheme: HidingScheme, sigma: np.ndarray) -> DecoderOutcome:
    """Run the transpose-channel decoder on a joint-space state."""
    sigma = check_density_operator(sigma)
    if sigma.shape[0] != scheme.total_dim:
        raise ValueError("input dimension does not match the scheme")
    ops, _ = decoder_kraus(scheme)
    probs = np.zeros(scheme.n + 1)
    acc = np.zeros((scheme.p, scheme.p), dtype=complex)
    for i, k in enumerate(ops):
        # each branch output lands in the carrier, so conjugate with the
        # subspace-compressed Kraus operator instead of the full one
        ck = dag(scheme.basis) @ k
        blk = ck @ sigma @ dag(ck)
        probs[i] = float(np.trace(blk).real)
        acc += blk
    probs[-1] = float(np.trace((np.eye(scheme.total_dim) - scheme.n_support) @ sigma).real)
    success = probs[:-1].sum()
    if success <= 1e-12:
        raise RuntimeError("decoder success probability vanished")
    recovered = hermitize(acc / success)
    return DecoderOutcome(recovered=recovered, branch_probabilities=probs)


def pgm_elements(scheme: HidingScheme) -> tuple[list[np.ndarray], np.ndarray]:
    """Square-root-measurement operators for the n*p carrier vectors.

    Element (i, j) is N^(-1/2) U_i |b_j><b_j| U_i^dag N^(-1/2), listed in
    i-major order, plus the completion I - support(N).
    """
    elements = []
    for i in range(scheme.n):
        u = scheme.rmap.ensemble.member(i)
        rotated = scheme.n_inv_sqrt @ u @ scheme.basis  # columns: N^-1/2 U_i b_j
        for j in range(scheme.p):
            elements.append(projector(rotated[:, j]))
    completion = hermitize(np.eye(scheme.total_dim) - scheme.n_support)
    return elements, completion


def delta_ij(scheme: HidingScheme, i: int, j: int) -> float:
    """Pairwise-overlap error budget of carrier vector (i, j).

    Sums |<b_j| U_i^dag U_i' |b_j'>|^2 over all (i', j') != (i, j).  The
    same-i cross terms are exactly zero by orthonormality and are checked
    to vanish; the total dominates the square-root measurement's failure
    probability on (i, j), which is also checked here.
    """
    if not (0 <= i < scheme.n and 0 <= j < scheme.p):
        raise IndexError(f"(i={i}, j={j}) out of range")
    u_i = scheme.rmap.ensemble.member(i)
    b_j = scheme.basis[:, j]
    total = 0.0
    same_i = 0.0
    for i2 in range(scheme.n):
        cross = dag(u_i) @ scheme.rmap.ensemble.member(i2)
        overlaps = np.abs(b_j.conj() @ cross @ scheme.basis) ** 2
        if i2 == i:
            keep = np.delete(overlaps, j)
            same_i = float(keep.sum())
            total += same_i
        else:
            total += float(overlaps.sum())
    if same_i > 1e-12:
        raise RuntimeError(f"same-index cross terms should vanish, got {same_i:.3e}")
    # success-probability floor from the discrimination criterion
    amp = b_j.conj() @ scheme.projector_s @ dag(u_i) @ scheme.n_inv_sqrt @ u_i @ b_j
    deficit = 1.0 - abs(amp) ** 2
    if deficit > total + 1e-9:
        raise RuntimeError(
            f"discrimination deficit {deficit:.3e} exceeds overlap budget {total:.3e}"
        )
    return total


@dataclass(frozen=True)
class ProductPOVM:
    """POVM whose elements are products X_i (x) Y_i of local PSD factors."""

    elements: list[tuple[np.ndarray, np.ndarray]]

    def joint_elements(self) -> list[np.ndarray]:
        return [np.kron(x, y) for x, y in self.elements]

    def completeness_defect(self, total_dim: int) -> float:
        acc = np.zeros((total_dim, total_dim), dtype=complex)
        for m in self.joint_elements():
            acc += m
        return float(np.max(np.abs(acc - np.eye(total_dim))))


def random_product_povm(d: int, stream: SeededStream) -> ProductPOVM:
    """Complete rank-1 product POVM from two independent local bases.

    Draws uniform unitaries V, W on dimension d and returns the d^2
    projector pairs (V|a><a|V^dag, W|b><b|W^dag).
    """
    v = haar_unitary(d, stream.child(0))
    w = haar_unitary(d, stream.child(1))
    elements = [
        (projector(v[:, a]), projector(w[:, b])) for a in range(d) for b in range(d)
    ]
    return ProductPOVM(elements)


def schmidt_adapted_povm(vec: np.ndarray, d: int) -> ProductPOVM:
    """Product-basis POVM aligned with the Schmidt bases of a joint vector."""
    m = np.asarray(vec, dtype=complex).reshape(d, d)
    left, _, right_h = np.linalg.svd(m)
    right = right_h.conj().T
    elements = [
        (projector(left[:, a]), projector(right[:, b])) for a in range(d) for b in range(d)
    ]
    return ProductPOVM(elements)


def security_probe(
    scheme: HidingScheme, phi0: np.ndarray, phi1: np.ndarray, povm: ProductPOVM
) -> float:
    """l1 distance between a product POVM's outcome laws on two hidden states.

    Both states are encoded without a key (the adversary's view); zero
    means the POVM learns nothing about which state was hidden.
    """
    defect = povm.completeness_defect(scheme.total_dim)
    if defect > 1e-8:
        raise ValueError(f"POVM does not resolve the identity: defect {defect:.3e}")
    e0 = encode(scheme, phi0)
    e1 = encode(scheme, phi1)
    diff = e0 - e1
    distance = 0.0
    for m in povm.joint_elements():
        distance += abs(float(np.trace(m @ diff).real))
    return distance


def correctness_to_trace(alpha: float) -> float:
    """Convert a worst-case fidelity deficit alpha to a trace-distance radius 2*sqrt(alpha)."""
    if not (0 <= alpha <= 1):
        raise ValueError("alpha must lie in [0, 1]")
    return 2.0 * math.sqrt(alpha)


@dataclass(frozen=True)
class HidingCapacity:
    """Hidden dimension from the asymptotic construction, with its validity flags."""

    p: int
    d: int
    delta: float
    epsilon: float
    d_large_enough: bool
    epsilon_condition: bool
    qubit_ratio: float  # log2(p) / log2(d^2), defined only for p >= 2


def hiding_capacity(d: int, delta: float, epsilon: float) -> HidingCapacity:
    """Evaluate p = C delta^2 epsilon^2 d / (1188 log2 d), C = 1/(6 ln 2).

    The validity conditions (d beyond a delta-dependent floor, and
    epsilon^2 log2(40/delta^2) < 1) are reported as flags rather than
    enforced, because the formula is still informative outside them.
    """
    if d < 2 or delta <= 0 or epsilon <= 0:
        raise ValueError("need d >= 2 and positive delta, epsilon")
    c = RATE_FLOOR_CONSTANT
    p = math.floor(c * delta**2 * epsilon**2 * d / (1188.0 * math.log2(d)))
    d_floor = max(36.0 / (c * delta**2), math.sqrt(15.0 / epsilon), 21.0)
    ratio = math.log2(p) / math.log2(d * d) if p >= 2 else 0.0
    return HidingCapacity(
        p=p,
        d=d,
        delta=delta,
        epsilon=epsilon,
        d_large_enough=d > d_floor,
        epsilon_condition=epsilon**2 * math.log2(40.0 / delta**2) < 1.0,
        qubit_ratio=ratio,
    )

"""Randomizing maps: uniform averages of unitary conjugations.

A map is scored by how far its output can sit from the maximally mixed
state.  The score reported here is ``d * max ||R(phi) - I/d||_inf`` over
a finite probe set, which lower-bounds the supremum over all states; the
report carries its probe source so the two are never confused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matcore import check_density_operator, check_pure_state, hermitize
from .sampler import SeededStream, UnitaryEnsemble, haar_pure_states

STATE_SOURCES = ("haar-samples", "net", "adversarial-restarts")


@dataclass(frozen=True)
class RandomizingMap:
    """Uniform-weight mixture of conjugations by an ensemble's members."""

    ensemble: UnitaryEnsemble

    @property
    def dim(self) -> int:
        return self.ensemble.dim

    @property
    def size(self) -> int:
        return self.ensemble.size


def apply_map(rmap: RandomizingMap, rho: np.ndarray) -> np.ndarray:
    """Average of U rho U^dag over the ensemble, for a density operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (rmap.dim, rmap.dim):
        raise ValueError(f"state dim {rho.shape} does not match map dim {rmap.dim}")
    out = np.zeros_like(rho)
    for block in rmap.ensemble.iter_batches():
        rotated = block @ rho
        out += np.matmul(rotated, block.conj().transpose(0, 2, 1)).sum(axis=0)
    return hermitize(out / rmap.size)


def apply_map_pure(rmap: RandomizingMap, psi: np.ndarray) -> np.ndarray:
    """Average of U |psi><psi| U^dag, using only matrix-vector products."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (rmap.dim,):
        raise ValueError(f"state dim {psi.shape} does not match map dim {rmap.dim}")
    out = np.zeros((rmap.dim, rmap.dim), dtype=complex)
    for block in rmap.ensemble.iter_batches():
        w = block @ psi
        out += np.einsum("ja,jb->ab", w, w.conj())
    return hermitize(out / rmap.size)


def state_deviation(rmap: RandomizingMap, psi: np.ndarray) -> float:
    """d * ||R(psi) - I/d||_inf for one pure state."""
    d = rmap.dim
    m = apply_map_pure(rmap, psi) - np.eye(d) / d
    return d * float(np.max(np.abs(np.linalg.eigvalsh(m))))


@dataclass(frozen=True)
class DeviationReport:
    """Sampled lower bound on a map's worst-case deviation from I/d.

    ``epsilon_emp`` is the max of ``per_state``; it certifies the true
    supremum only when the probe set does (tiny-dimension nets), which is
    what ``state_source`` records.
    """

    epsilon_emp: float
    per_state: np.ndarray
    sample_count: int
    state_source: str

    def merged(self, other: "DeviationReport") -> "DeviationReport":
        if self.state_source != other.state_source:
            raise ValueError("cannot merge reports from different state sources")
        per = np.concatenate([self.per_state, other.per_state])
        return DeviationReport(float(per.max()), per, len(per), self.state_source)


def measure_epsilon(rmap: RandomizingMap, states: np.ndarray, source: str) -> DeviationReport:
    """Evaluate the deviation score on each probe state and report the max."""
    if source not in STATE_SOURCES:
        raise ValueError(f"state source must be one of {STATE_SOURCES}")
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    if states.shape[0] == 0:
        raise ValueError("probe state set is empty")
    devs = np.array([state_deviation(rmap, psi) for psi in states])
    return DeviationReport(float(devs.max()), devs, len(devs), source)


def adversarial_probe_states(
    rmap: RandomizingMap, stream: SeededStream, restarts: int = 20, iters: int = 30
) -> np.ndarray:
    """Probe states found by alternating eigenvector ascent.

    Each restart alternates between the extremal eigenvector of the
    deviation operator R(phi) - I/d and the input state that maximizes
    (or minimizes) its weight under the adjoint map, sharpening the
    deviation lower bound beyond plain sampling.
    """
    d = rmap.dim
    eye = np.eye(d) / d
    found = []
    starts = haar_pure_states(d, restarts, stream)
    for phi in starts:
        last = -1.0
        for _ in range(iters):
            m = apply_map_pure(rmap, phi) - eye
            w, v = np.linalg.eigh(m)
            k = int(np.argmax(np.abs(w)))
            psi = v[:, k]
            # adjoint map weight of psi as a function of the input state
            radj = np.zeros((d, d), dtype=complex)
            for block in rmap.ensemble.iter_batches():
                a = np.einsum("jba,b->ja", block.conj(), psi)
                radj += np.einsum("ja,jb->ab", a, a.conj())
            radj = hermitize(radj / rmap.size)
            wv, vv = np.linalg.eigh(radj)
            phi_next = vv[:, -1] if w[k] > 0 else vv[:, 0]
            dev = state_deviation(rmap, phi_next)
            phi = phi_next
            if abs(dev - last) < 1e-12:
                break
            last = dev
        found.append(phi)
    return np.stack(found)


def theoretical_n(d: int, epsilon: float) -> int:
    """Ensemble size from the near-uniform randomization guarantee.

    Evaluates ceil(134 * d * log2(d) / epsilon^2).  Valid only for
    epsilon > 0 and sufficiently large d (d > 10/epsilon); violations
    raise with the failing condition spelled out.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if d <= 10.0 / epsilon:
        raise ValueError(
            f"requires sufficiently large d (d > 10/epsilon): d={d}, 10/epsilon={10.0 / epsilon}"
        )
    return math.ceil(134.0 * d * math.log2(d) / epsilon**2)


def key_length(d: int, epsilon: float) -> float:
    """Key bits for the near-uniform keyed channel:
    log2 d + log2 log2 d + log2(1/epsilon^2) + 8."""
    if d < 2 or not (0 < epsilon <= 1):
        raise ValueError("need d >= 2 and epsilon in (0, 1]")
    return math.log2(d) + math.log2(math.log2(d)) + math.log2(1.0 / epsilon**2) + 8.0


@dataclass(frozen=True)
class StateNet:
    """Greedy packing of pure states with pairwise trace distance >= radius."""

    dim: int
    radius: float
    points: np.ndarray  # (m, dim)

    def nearest_overlap(self, states: np.ndarray) -> np.ndarray:
        """Max squared overlap of each query state with the net."""
        states = np.atleast_2d(states)
        return np.max(np.abs(states.conj() @ self.points.T) ** 2, axis=1)


def build_state_net(
    dim: int, radius: float, stream: SeededStream, max_rejections: int = 50_000
) -> StateNet:
    """Greedy maximal packing in trace distance.

    Samples uniform states, admits any candidate at distance >= radius
    from every admitted point, and stops after ``max_rejections``
    consecutive rejections.  Maximality of the packing then implies a
    covering of radius ``radius`` with high confidence (audit with
    :func:`covering_audit`).  Guarded to dim <= 4 and radius >= 0.3
    because the packing size blows up beyond that.
    """
    if not (0.0 < radius < 1.0):
        raise ValueError("radius must lie in (0, 1)")
    if dim > 4 or radius < 0.3:
        raise ValueError("net construction is guarded to dim <= 4 and radius >= 0.3")
    if dim == 1:
        return StateNet(1, radius, np.ones((1, 1), dtype=complex))
    # distance >= radius  <=>  squared overlap <= 1 - (radius/2)^2
    overlap_cap = 1.0 - (radius / 2.0) ** 2
    rng = stream.rng()
    points: list[np.ndarray] = []
    streak = 0
    batch = 1024
    while streak < max_rejections:
        g = rng.standard_normal((batch, dim)) + 1j * rng.standard_normal((batch, dim))
        cands = g / np.linalg.norm(g, axis=1, keepdims=True)
        for cand in cands:
            if points:
                ov = np.abs(np.asarray(points).conj() @ cand) ** 2
                if float(ov.max()) > overlap_cap:
                    streak += 1
                    if streak >= max_rejections:
                        break
                    continue
            points.append(cand)
            streak = 0
    return StateNet(dim, radius, np.stack(points))


@dataclass(frozen=True)
class CoveringAudit:
    sample_count: int
    covered_fraction: float
    max_nearest_distance: float


def covering_audit(net: StateNet, count: int, stream: SeededStream) -> CoveringAudit:
    """Check that fresh uniform states land within the net radius."""
    fresh = haar_pure_states(net.dim, count, stream)
    ov = net.nearest_overlap(fresh)
    dist = 2.0 * np.sqrt(np.clip(1.0 - ov, 0.0, None))
    covered = float(np.mean(dist <= net.radius + 1e-12))
    return CoveringAudit(count, covered, float(dist.max()))


@dataclass(frozen=True)
class EntangledProbeResult:
    """Spectral footprint of the map applied to half a maximally entangled state."""

    choi_rank: int
    trace_distance_lower: float
    ensemble_size: int
    dim: int


def entangled_probe(rmap: RandomizingMap, rank_cutoff: float = 1e-8) -> EntangledProbeResult:
    """Rank and trace distance of (R (x) I) applied to maximal entanglement.

    The output state is the uniform mixture of the vectorized ensemble
    members, so its rank is at most the ensemble size and its trace
    distance from I/d^2 is forced to at least 2*(1 - rank/d^2).  Both
    facts are checked and violations raise.
    """
    d = rmap.dim
    dd = d * d
    if dd > 4096:
        raise ValueError("memory guard: d^2 must not exceed 4096")
    choi = np.zeros((dd, dd), dtype=complex)
    for block in rmap.ensemble.iter_batches():
        vecs = block.reshape(len(block), dd) / np.sqrt(d)
        choi += np.einsum("ja,jb->ab", vecs, vecs.conj())
    choi = hermitize(choi / rmap.size)
    w = np.linalg.eigvalsh(choi)
    rank = int(np.sum(w > rank_cutoff * float(w[-1])))
    distance = float(np.abs(w - 1.0 / dd).sum())
    if rank > rmap.size:
        raise RuntimeError(f"output rank {rank} exceeds ensemble size {rmap.size}")
    forced = 2.0 * (1.0 - rank / dd)
    if distance < forced - 1e-6:
        raise RuntimeError(
            f"trace distance {distance} below the rank-forced floor {forced}"
        )
    return EntangledProbeResult(rank, distance, rmap.size, d)


def separable_destruction_check(
    rmap: RandomizingMap, mixture: list[tuple[float, np.ndarray, np.ndarray]]
) -> float:
    """Residual correlation after randomizing one share of a separable state.

    ``mixture`` lists (weight, state_A, state_B) with states given as
    density matrices or pure vectors.  Returns the trace norm of
    (R (x) I)(rho_AB) - I/d (x) rho_B, which convexity pins beneath the
    map's worst single-share trace-norm deviation.
    """
    weights = np.array([w for w, _, _ in mixture], dtype=float)
    if weights.size == 0:
        raise ValueError("mixture is empty")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("mixture weights must form a probability distribution")
    d = rmap.dim

    def as_density(x):
        x = np.asarray(x, dtype=complex)
        if x.ndim == 1:
            check_pure_state(x)
            return np.outer(x, x.conj())
        return check_density_operator(x)

    total = None
    for w, a, b in mixture:
        rho_a = as_density(a)
        rho_bi = as_density(b)
        if rho_a.shape[0] != d:
            raise ValueError("A-share dimension does not match the map")
        randomized = apply_map(rmap, rho_a) - np.eye(d) / d
        term = w * np.kron(randomized, rho_bi)
        if total is None:
            total = term
        elif term.shape != total.shape:
            raise ValueError("B-share dimensions differ across the mixture")
        else:
            total += term
    return float(np.abs(np.linalg.eigvalsh(hermitize(total))).sum())

"""Keyed encryption with a unitary ensemble and its leakage accounting.

The key is an index into the ensemble; the sender conjugates by the
keyed member, the receiver undoes it, and anyone without the key sees
the uniform average over members.  Leakage to the keyless observer is
scored with the Holevo quantity of the averaged outputs.
"""

from __future__ import annotations

import math

import numpy as np

from .matcore import check_density_operator, dag, von_neumann_entropy
from .randomizer import RandomizingMap, apply_map

#: Input ensembles for the Holevo quantity are capped at this many members.
MAX_INPUT_STATES = 64


def _check_key(rmap: RandomizingMap, key: int) -> int:
    key = int(key)
    if not (0 <= key < rmap.size):
        raise ValueError(f"key {key} out of range [0, {rmap.size})")
    return key


def weyl_key(d: int, j: int, k: int) -> int:
    """Flatten a (shift, clock) exponent pair into a single key index."""
    if not (0 <= j < d and 0 <= k < d):
        raise ValueError(f"exponents ({j},{k}) out of range for dim {d}")
    return j * d + k


def encrypt(rmap: RandomizingMap, key: int, rho: np.ndarray) -> np.ndarray:
    """Conjugate the state by the keyed ensemble member."""
    key = _check_key(rmap, key)
    rho = check_density_operator(rho)
    u = rmap.ensemble.member(key)
    return u @ rho @ dag(u)


def decrypt(rmap: RandomizingMap, key: int, sigma: np.ndarray) -> np.ndarray:
    """Invert :func:`encrypt` with the same key."""
    key = _check_key(rmap, key)
    sigma = check_density_operator(sigma)
    u = rmap.ensemble.member(key)
    return dag(u) @ sigma @ u


def eavesdropper_view(rmap: RandomizingMap, rho: np.ndarray) -> np.ndarray:
    """Key-averaged ciphertext: what the channel shows without the key."""
    return apply_map(rmap, check_density_operator(rho))


def check_input_ensemble(inputs: list[tuple[float, np.ndarray]]) -> list[tuple[float, np.ndarray]]:
    """Validate a (probability, density operator) list."""
    if not inputs:
        raise ValueError("input ensemble is empty")
    if len(inputs) > MAX_INPUT_STATES:
        raise ValueError(f"input ensembles capped at {MAX_INPUT_STATES} members")
    probs = np.array([p for p, _ in inputs], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("input probabilities must form a distribution")
    return [(float(p), check_density_operator(rho)) for p, rho in inputs]


def holevo_quantity(rmap: RandomizingMap, inputs: list[tuple[float, np.ndarray]]) -> float:
    """Holevo quantity of the key-averaged outputs, in bits.

    chi = S(sum_i p_i R(rho_i)) - sum_i p_i S(R(rho_i)), computed by
    exact eigendecomposition.
    """
    inputs = check_input_ensemble(inputs)
    outputs = [(p, apply_map(rmap, rho)) for p, rho in inputs]
    mixture = np.sum([p * out for p, out in outputs], axis=0)
    chi = von_neumann_entropy(mixture)
    chi -= sum(p * von_neumann_entropy(out) for p, out in outputs)
    return float(chi)


def holevo_bound(epsilon: float) -> float:
    """Leakage ceiling log2(1 + epsilon) implied by a deviation score epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return math.log2(1.0 + epsilon)


def holevo_bound_loose(epsilon: float) -> float:
    """The weaker linear ceiling epsilon / ln 2."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return epsilon / math.log(2.0)

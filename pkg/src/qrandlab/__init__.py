"""Numerical laboratory for approximate randomization of quantum states.

Builds seeded ensembles of unitaries (Haar, Weyl shift-and-clock, Pauli
words), measures how well their uniform average scrambles input states,
and runs the downstream constructions that scrambling enables: keyed
encryption with an information-theoretic leakage budget, bipartite
subspace hiding with transpose-channel decoding, and basis ensembles
whose measurement entropy stays near maximal for every input state.
"""

__version__ = "0.1.0"

from .matcore import (
    operator_norm,
    partial_trace,
    pure_trace_distance,
    shannon_entropy,
    tensor_product,
    trace_norm,
    von_neumann_entropy,
)
from .sampler import (
    PauliWord,
    SeededStream,
    UnitaryEnsemble,
    build_ensemble,
    ginibre,
    haar_pure_state,
    haar_unitary,
    pauli_word_unitary,
    weyl_operator,
)
from .randomizer import RandomizingMap, apply_map, measure_epsilon

__all__ = [
    "PauliWord",
    "RandomizingMap",
    "SeededStream",
    "UnitaryEnsemble",
    "apply_map",
    "build_ensemble",
    "ginibre",
    "haar_pure_state",
    "haar_unitary",
    "measure_epsilon",
    "operator_norm",
    "partial_trace",
    "pauli_word_unitary",
    "pure_trace_distance",
    "shannon_entropy",
    "tensor_product",
    "trace_norm",
    "von_neumann_entropy",
    "weyl_operator",
]

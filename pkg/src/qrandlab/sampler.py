"""Seeded generation of random matrices, states and unitary ensembles.

Randomness flows through :class:`SeededStream`, a (root seed, derivation
path) descriptor.  A stream is a pure value: every function that takes
one opens a fresh generator at the same point, so the same stream always
yields the same draw.  Independent draws must use distinct child paths.

Basis labels run 0..d-1 internally; the clock operator carries phases
exp(2*pi*i*j/d) for j = 0..d-1.  The alternative 1..d labelling differs
only by a global phase on the clock, which no conjugation-based map can
see.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .matcore import dag

#: Ensembles whose total entry count (n * dim^2) exceeds this are never
#: materialized; members are regenerated from the seed path on demand.
MATERIALIZE_ENTRY_CAP = 10**8

#: Materialize eagerly only below this entry count to keep memory flat.
MATERIALIZE_EAGER_ENTRIES = 4 * 10**6

UNITARITY_TOL = 1e-10

ENSEMBLE_KINDS = ("haar", "weyl", "pauli", "mub2")


@dataclass(frozen=True)
class SeededStream:
    """Reproducible randomness descriptor: 64-bit root seed plus a path.

    Identical (root_seed, path) pairs produce bit-identical sample
    sequences across runs and platforms.
    """

    root_seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not (0 <= int(self.root_seed) < 2**64):
            raise ValueError("root_seed must fit in 64 bits")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))
        for p in self.path:
            if not (0 <= p < 2**32):
                raise ValueError("path entries must be nonnegative 32-bit integers")

    def child(self, *indices: int) -> "SeededStream":
        """Derive an independent sub-stream."""
        return SeededStream(self.root_seed, self.path + tuple(int(i) for i in indices))

    def rng(self) -> np.random.Generator:
        """Open a fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=self.root_seed, spawn_key=self.path)
        return np.random.default_rng(seq)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def ginibre(dim: int, stream: SeededStream) -> np.ndarray:
    """dim x dim matrix of i.i.d. complex standard normals.

    Real and imaginary parts are independent Gaussians with variance 1/2,
    so E|g|^2 = 1 and E|g|^4 = 2 per entry.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    return _ginibre(stream.rng(), dim, dim)


def _haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = _ginibre(rng, dim, dim)
    q, r = np.linalg.qr(z)
    # QR alone is not uniform: the R-diagonal phases must be divided out.
    ph = np.diag(r)
    return q * (ph / np.abs(ph)).conj()


def haar_unitary(dim: int, stream: SeededStream) -> np.ndarray:
    """Uniformly distributed unitary via phase-corrected QR of a Ginibre draw."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return _haar_unitary(stream.rng(), dim)


def _haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = _ginibre(rng, dim, 1)[:, 0]
    return g / np.linalg.norm(g)


def haar_pure_state(dim: int, stream: SeededStream) -> np.ndarray:
    """Uniformly distributed pure state (normalized Ginibre column)."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return _haar_state(stream.rng(), dim)


def haar_pure_states(dim: int, count: int, stream: SeededStream) -> np.ndarray:
    """(count, dim) array of independent uniform pure states."""
    g = _ginibre(stream.rng(), count, dim)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def weyl_operator(dim: int, a: int, b: int) -> np.ndarray:
    """Shift-and-clock unitary X^a Z^b on dimension ``dim``.

    X cyclically shifts the basis, Z multiplies basis vector j by
    exp(2*pi*i*j/dim).
    """
    if not (0 <= a < dim and 0 <= b < dim):
        raise ValueError(f"exponents ({a},{b}) out of range for dim {dim}")
    j = np.arange(dim)
    m = np.zeros((dim, dim), dtype=complex)
    m[(j + a) % dim, j] = np.exp(2j * np.pi * b * j / dim)
    return m


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-qubit X^x Z^z factors, one bit pair per qubit."""

    qubit_count: int
    x_mask: tuple[int, ...]
    z_mask: tuple[int, ...]

    def __post_init__(self):
        if len(self.x_mask) != self.qubit_count or len(self.z_mask) != self.qubit_count:
            raise ValueError("masks must have one bit per qubit")
        if any(b not in (0, 1) for b in self.x_mask + self.z_mask):
            raise ValueError("mask entries must be bits")


def pauli_word_unitary(word: PauliWord) -> np.ndarray:
    """Matrix of a Pauli word (qubit 0 is the most significant factor).

    The word acts as |j> -> (-1)^{popcount(z & j)} |j xor x|, a signed
    permutation, which is assembled directly instead of by repeated
    Kronecker products.
    """
    q = word.qubit_count
    if q > 12:
        raise ValueError("qubit_count capped at 12 (matrix size 4096)")
    dim = 1 << q
    x_int = 0
    z_int = 0
    for bit_x, bit_z in zip(word.x_mask, word.z_mask):
        x_int = (x_int << 1) | bit_x
        z_int = (z_int << 1) | bit_z
    j = np.arange(dim)
    signs = (-1.0) ** np.array([bin(z_int & jj).count("1") for jj in j])
    m = np.zeros((dim, dim), dtype=complex)
    m[j ^ x_int, j] = signs
    return m


def random_pauli_word(qubit_count: int, stream: SeededStream) -> PauliWord:
    """Uniform Pauli word; masks are i.i.d. fair bits (identity included)."""
    bits = stream.rng().integers(0, 2, size=2 * qubit_count)
    return PauliWord(qubit_count, tuple(bits[:qubit_count]), tuple(bits[qubit_count:]))


def fourier_matrix(dim: int) -> np.ndarray:
    """Unitary discrete Fourier transform on ``dim`` levels."""
    j = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)


@dataclass(frozen=True)
class UnitaryEnsemble:
    """Ordered, seed-regenerable list of ``size`` unitaries on ``dim``.

    ``kind`` selects the member law:

    - ``haar``: independent uniform unitaries.
    - ``weyl``: the full set of dim^2 shift-and-clock products when
      ``size == dim**2``, otherwise uniform draws with replacement.
    - ``pauli``: uniform Pauli words (dim must be a power of two).
    - ``mub2``: the fixed pair {identity, Fourier matrix} (size 2); the
      two bases are mutually unbiased.

    Member j depends only on (stream, j), so a regenerated member is
    bit-identical to its materialized copy.
    """

    dim: int
    size: int
    kind: str
    stream: SeededStream
    _members: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        entries = self.size * self.dim * self.dim
        if self._members is None and entries <= MATERIALIZE_EAGER_ENTRIES:
            members = tuple(self._generate(j) for j in range(self.size))
            object.__setattr__(self, "_members", members)

    @property
    def materialized(self) -> bool:
        return self._members is not None

    def _generate(self, j: int) -> np.ndarray:
        if self.kind == "haar":
            return _haar_unitary(self.stream.child(j).rng(), self.dim)
        if self.kind == "weyl":
            if self.size == self.dim**2:
                return weyl_operator(self.dim, *divmod(j, self.dim))
            a, b = self.stream.child(j).rng().integers(0, self.dim, size=2)
            return weyl_operator(self.dim, int(a), int(b))
        if self.kind == "pauli":
            q = self.dim.bit_length() - 1
            return pauli_word_unitary(random_pauli_word(q, self.stream.child(j)))
        if self.kind == "mub2":
            return np.eye(self.dim, dtype=complex) if j == 0 else fourier_matrix(self.dim)
        raise AssertionError(self.kind)

    def member(self, j: int) -> np.ndarray:
        if not (0 <= j < self.size):
            raise IndexError(f"member index {j} out of range for size {self.size}")
        if self._members is not None:
            return self._members[j]
        return self._generate(j)

    def __iter__(self) -> Iterator[np.ndarray]:
        return (self.member(j) for j in range(self.size))

    def __len__(self) -> int:
        return self.size

    def stack(self) -> np.ndarray:
        """All members as one (size, dim, dim) array."""
        if self.size * self.dim * self.dim > MATERIALIZE_ENTRY_CAP:
            raise ValueError(
                "ensemble too large to materialize; iterate with iter_batches instead"
            )
        return np.stack([self.member(j) for j in range(self.size)])

    def iter_batches(self, batch: int = 512) -> Iterator[np.ndarray]:
        """Yield members in stacked batches without full materialization."""
        for start in range(0, self.size, batch):
            stop = min(start + batch, self.size)
            yield np.stack([self.member(j) for j in range(start, stop)])

    def unitarity_residual(self) -> float:
        """Max over members of the max-entry deviation of U^dag U from I."""
        eye = np.eye(self.dim)
        worst = 0.0
        for block in self.iter_batches():
            for u in block:
                worst = max(worst, float(np.max(np.abs(dag(u) @ u - eye))))
        return worst


def build_ensemble(dim: int, n: int, kind: str, stream: SeededStream) -> UnitaryEnsemble:
    """Construct a seeded ensemble, validating the kind-specific preconditions."""
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    if kind == "pauli" and (dim & (dim - 1)) != 0:
        raise ValueError("pauli ensembles need a power-of-two dimension")
    if kind == "mub2" and n != 2:
        raise ValueError("mub2 is a fixed pair; n must be 2")
    return UnitaryEnsemble(dim=dim, size=n, kind=kind, stream=stream)

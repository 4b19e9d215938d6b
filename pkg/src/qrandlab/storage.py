"""On-disk ensemble format.

A file is one text header line followed, for materialized ensembles, by
raw member data::

    QRE1 {"dim": D, "kind": K, "materialized": B, "n": N, "seed": {...}}\\n
    <little-endian float64 (re, im) pairs, row-major, unitary-major>

Header-only files store just the seed descriptor and are regenerated on
load.  Every load audits unitarity of the members it returns.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .sampler import MATERIALIZE_ENTRY_CAP, SeededStream, UnitaryEnsemble

MAGIC = "QRE1 "
LOAD_UNITARITY_TOL = 1e-8


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qre-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_ensemble(ensemble: UnitaryEnsemble, path: str, materialize: bool | None = None) -> None:
    """Write an ensemble; ``materialize`` overrides the ensemble's own state."""
    store_members = ensemble.materialized if materialize is None else materialize
    entries = ensemble.size * ensemble.dim * ensemble.dim
    if store_members and entries > MATERIALIZE_ENTRY_CAP:
        raise ValueError("ensemble too large to store materialized; save header-only")
    header = {
        "dim": ensemble.dim,
        "n": ensemble.size,
        "kind": ensemble.kind,
        "seed": {"root": ensemble.stream.root_seed, "path": list(ensemble.stream.path)},
        "materialized": bool(store_members),
    }
    blob = MAGIC + json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n"
    data = blob.encode("ascii")
    if store_members:
        body = np.concatenate(
            [block.astype("<c16").reshape(-1) for block in ensemble.iter_batches()]
        )
        data += body.tobytes(order="C")
    _atomic_write(path, data)


def load_ensemble(path: str) -> UnitaryEnsemble:
    """Read an ensemble back; raises on bad magic, truncation or bad members."""
    with open(path, "rb") as fh:
        raw = fh.read()
    newline = raw.find(b"\n")
    if newline < 0 or not raw.startswith(MAGIC.encode("ascii")):
        raise ValueError("not an ensemble file: bad magic")
    try:
        header = json.loads(raw[len(MAGIC) : newline].decode("ascii"))
        dim = int(header["dim"])
        n = int(header["n"])
        kind = str(header["kind"])
        seed = header["seed"]
        stream = SeededStream(int(seed["root"]), tuple(int(p) for p in seed["path"]))
        materialized = bool(header["materialized"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ValueError(f"corrupt ensemble header: {exc}") from exc
    body = raw[newline + 1 :]
    if materialized:
        expected = n * dim * dim * 16
        if len(body) != expected:
            raise ValueError(
                f"truncated or oversized member data: {len(body)} bytes, expected {expected}"
            )
        members = np.frombuffer(body, dtype="<c16").astype(np.complex128)
        members = members.reshape(n, dim, dim)
        ensemble = UnitaryEnsemble(
            dim=dim, size=n, kind=kind, stream=stream, _members=tuple(members)
        )
    else:
        if body:
            raise ValueError("header-only ensemble carries trailing bytes")
        ensemble = UnitaryEnsemble(dim=dim, size=n, kind=kind, stream=stream)
    if materialized:
        residual = ensemble.unitarity_residual()
    else:
        # regenerated members are unitary by construction; spot-check a few
        eye = np.eye(dim)
        picks = range(0, n, max(1, n // 8))
        residual = max(
            float(np.max(np.abs(ensemble.member(j).conj().T @ ensemble.member(j) - eye)))
            for j in picks
        )
    if residual > LOAD_UNITARITY_TOL:
        raise ValueError(f"unitarity audit failed on load: residual {residual:.3e}")
    return ensemble

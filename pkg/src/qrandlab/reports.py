"""Experiment reports: per-trial CSV, JSON summary, atomic writes.

The statistics section of a report is a pure function of (command,
parameters, seed): floats are printed with 17 significant digits and
keys are sorted, so reruns produce byte-identical CSV bytes and an
identical ``stats``/``flags``/``rows`` payload.  Wall-clock time lives
outside that section.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

FLOAT_FORMAT = "%.17g"


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


@dataclass
class ExperimentReport:
    """Record of one seeded experiment run."""

    command: str
    params: dict
    version: str
    columns: list[str] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    wall_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.flags.values())

    def stats_blob(self) -> bytes:
        """Deterministic serialization of the statistics section."""
        payload = {
            "command": self.command,
            "params": self.params,
            "stats": {k: format_value(v) for k, v in sorted(self.stats.items())},
            "flags": {k: bool(v) for k, v in sorted(self.flags.items())},
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("ascii")

    def csv_bytes(self) -> bytes:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(format_value(v) for v in row))
        return ("\n".join(lines) + "\n").encode("ascii")

    def json_payload(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "version": self.version,
            "wall_seconds": self.wall_seconds,
            "stats": {k: self.stats[k] for k in sorted(self.stats)},
            "flags": {k: bool(self.flags[k]) for k in sorted(self.flags)},
            "row_count": len(self.rows),
        }

    def json_bytes(self) -> bytes:
        return (
            json.dumps(self.json_payload(), sort_keys=True, indent=2, default=float) + "\n"
        ).encode("ascii")


def atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: ExperimentReport, base_path: str) -> dict[str, str]:
    """Write ``<base>.csv`` and ``<base>.json``; returns the paths."""
    paths = {"csv": base_path + ".csv", "json": base_path + ".json"}
    atomic_write_bytes(paths["csv"], report.csv_bytes())
    atomic_write_bytes(paths["json"], report.json_bytes())
    return paths

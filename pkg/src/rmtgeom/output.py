"""Deterministic CSV output and reproducibility manifests.

Every CLI run writes its data files plus a manifest recording the exact
configuration, master seed, a content hash of the inputs, wall time, and a
checksum per output file. Rerunning with the same manifest settings must
reproduce the files byte for byte, independent of thread count.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["format_float", "write_csv", "sha256_file", "RunManifest"]


def format_float(x) -> str:
    """17-significant-digit decimal, enough to round-trip any float64."""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.17g}"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Single header line, fixed column order, deterministic float text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) if not isinstance(v, str) else v
                              for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    master_seed: int
    started: float = field(default_factory=time.time)
    input_hash: str = ""
    wall_time_s: float = 0.0
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        canon = json.dumps({"command": self.command, "config": self.config,
                            "master_seed": self.master_seed},
                           sort_keys=True, separators=(",", ":"))
        self.input_hash = hashlib.sha256(canon.encode()).hexdigest()

    def add_output(self, path) -> None:
        self.outputs[Path(path).name] = sha256_file(path)

    def write(self, out_dir) -> Path:
        self.wall_time_s = time.time() - self.started
        payload = {
            "command": self.command,
            "config": self.config,
            "master_seed": self.master_seed,
            "input_hash": self.input_hash,
            "wall_time_s": round(self.wall_time_s, 3),
            "outputs": self.outputs,
        }
        path = Path(out_dir) / f"{self.command.replace(' ', '_')}_manifest.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path

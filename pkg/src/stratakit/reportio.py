"""Canonical report serialization and atomic file output.

Reports must be byte-identical across runs and platforms for fixed inputs,
so JSON is rendered by hand: sorted keys, no whitespace games, floats at 17
significant digits (enough to round-trip IEEE doubles deterministically).
Timing lives in a sidecar file, never in the canonical payload.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

LIBRARY_VERSION = "0.1.0"


def _canon_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"non-finite value {x} in a canonical report")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    s = f"{x:.17g}"
    # ".17g" may emit bare integers; keep them valid JSON as-is
    return s


def canonical_json(obj) -> str:
    """Render ``obj`` (dict/list/str/num/bool/None) as canonical JSON text."""
    parts: list[str] = []
    _render(obj, parts)
    return "".join(parts) + "\n"


def _render(obj, parts: list[str]):
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_canon_float(float(obj)))
    elif isinstance(obj, str):
        import json

        parts.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, np.ndarray):
        _render(obj.tolist(), parts)
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _render(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                parts.append(",")
            if not isinstance(key, str):
                raise ValueError(f"non-string key {key!r} in a canonical report")
            import json

            parts.append(json.dumps(key, ensure_ascii=True))
            parts.append(":")
            _render(obj[key], parts)
        parts.append("}")
    else:
        raise ValueError(f"cannot canonically serialize {type(obj).__name__}")


def atomic_write_text(path, text: str):
    """Write via a temp file in the target directory plus rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class CampaignResult:
    """Envelope written by every CLI command.

    ``wall_time`` is measured but serialized separately; the canonical
    payload must be byte-stable for fixed inputs.
    """

    scene_id: str
    command: str
    reports: list
    seed: int
    wall_time: float = 0.0
    library_version: str = LIBRARY_VERSION

    def to_canonical_dict(self) -> dict:
        return {
            "schema": "stratakit.result.v1",
            "scene_id": self.scene_id,
            "command": self.command,
            "seed": self.seed,
            "library_version": self.library_version,
            "reports": [r.to_json_dict() if hasattr(r, "to_json_dict") else r
                        for r in self.reports],
        }

    def write(self, json_path) -> None:
        atomic_write_text(json_path, canonical_json(self.to_canonical_dict()))
        meta = {"wall_time_seconds": float(self.wall_time)}
        atomic_write_text(str(json_path) + ".meta.json", canonical_json(meta))


def format_columns(rows, header: list[str] | None = None) -> str:
    """Whitespace-separated plot data; floats at 17 significant digits."""
    lines = []
    if header:
        lines.append("# " + " ".join(header))
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(_canon_float(float(cell)))
            else:
                cells.append(str(cell))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def format_csv(rows, header: list[str]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(_canon_float(float(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"

"""JSON file formats for channel matrices and measured counts.

A channel file is an object ``{"n": int, "convention": str, "rows": [...]}``
where ``convention`` is one of ``"ptm"``, ``"error"``, ``"liouville"`` or
``"choi"`` and each matrix entry is a ``[re, im]`` pair (bare numbers are
accepted on read).  An optional ``"scale"`` key multiplies every entry on
load; the bundled fixture files use it to carry tabulated values verbatim
next to their published power-of-ten factor.

A counts file is a flat object ``{circuit_label: [counts, ...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from .channels import ChoiMatrix, ErrorMatrix, LiouvilleSuperoperator, PauliTransferMatrix

Channel = PauliTransferMatrix | ErrorMatrix | LiouvilleSuperoperator | ChoiMatrix

_CONVENTIONS = {
    "ptm": PauliTransferMatrix,
    "error": ErrorMatrix,
    "liouville": LiouvilleSuperoperator,
    "choi": ChoiMatrix,
}
_CONVENTION_NAMES = {cls: name for name, cls in _CONVENTIONS.items()}


def _entry_to_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    re, im = entry
    return complex(re, im)


def channel_to_dict(channel: Channel) -> dict:
    """JSON-ready dictionary for a channel object."""
    matrix = np.asarray(channel.matrix, dtype=complex)
    rows = [[[entry.real, entry.imag] for entry in row] for row in matrix]
    return {"n": channel.n, "convention": _CONVENTION_NAMES[type(channel)], "rows": rows}


def channel_from_dict(data: Mapping) -> Channel:
    """Inverse of :func:`channel_to_dict`; applies the optional scale factor."""
    try:
        cls = _CONVENTIONS[data["convention"]]
        n = int(data["n"])
        rows = data["rows"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed channel data: {exc}") from exc
    matrix = np.array([[_entry_to_complex(e) for e in row] for row in rows], dtype=complex)
    matrix = matrix * float(data.get("scale", 1.0))
    if cls in (PauliTransferMatrix, ErrorMatrix):
        if np.abs(matrix.imag).max() > 0:
            raise ValueError(f"{data['convention']} matrices must be real")
        matrix = matrix.real
    return cls(n=n, matrix=matrix)


def save_channel(path: str | Path, channel: Channel) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(channel)) + "\n")


def load_channel(path: str | Path) -> Channel:
    return channel_from_dict(json.loads(Path(path).read_text()))


def dump_counts(path: str | Path, counts: Mapping) -> None:
    """Write a circuit -> counts table keyed by circuit labels."""
    data = {circuit.label: np.asarray(vec).tolist() for circuit, vec in counts.items()}
    Path(path).write_text(json.dumps(data) + "\n")


def load_counts(path: str | Path) -> dict[str, np.ndarray]:
    """Read a counts table back as a label -> array mapping."""
    data = json.loads(Path(path).read_text())
    return {label: np.asarray(vec, dtype=float) for label, vec in data.items()}

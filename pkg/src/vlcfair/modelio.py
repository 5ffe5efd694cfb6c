"""Flat-text persistence for allocation models and tabular outputs.

Model files hold one ``key = value`` per line plus ``#``-prefixed
provenance comments.  Tabular outputs are comma-separated UTF-8 with a
mandatory header row; every float is written in scientific notation
with nine significant digits so files are byte-stable across runs and
platforms.  Writes go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path
from typing import Dict, Optional

from .allocate import EfopaModel, MuMode
from .expfit import ExpFitCoefficients

__all__ = [
    "format_float",
    "provenance_lines",
    "atomic_write_text",
    "save_model",
    "load_model",
]

_MODEL_KEYS = ("a", "b", "c", "d", "h_ref", "p_ref", "h0", "mu_mode", "clamp_floor")


def format_float(x: float) -> str:
    """Scientific notation, nine significant digits, locale-free."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{float(x):.8e}"


def provenance_lines(
    tool_version: str, config_digest: str, seed, extra: Optional[Dict] = None
) -> list:
    """Header comments embedded in every output file."""
    lines = [
        f"# tool_version = {tool_version}",
        f"# config_digest = {config_digest}",
        f"# seed = {seed}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"# {key} = {value}")
    return lines


def atomic_write_text(path, text: str):
    """Write the full document, then rename into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(path, model: EfopaModel, provenance: Optional[Dict] = None):
    """Persist a model as flat text with optional provenance comments."""
    lines = []
    for key, value in (provenance or {}).items():
        lines.append(f"# {key} = {value}")
    co = model.coefficients
    values = {
        "a": format_float(co.a),
        "b": format_float(co.b),
        "c": format_float(co.c),
        "d": format_float(co.d),
        "h_ref": format_float(model.h_ref),
        "p_ref": format_float(model.p_ref),
        "h0": format_float(model.h0),
        "mu_mode": model.mu_mode.value,
        "clamp_floor": format_float(model.clamp_floor),
    }
    for key in _MODEL_KEYS:
        lines.append(f"{key} = {values[key]}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_model(path) -> EfopaModel:
    """Read a model file written by save_model."""
    fields = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        fields[key.strip()] = value.strip()
    missing = [k for k in _MODEL_KEYS if k not in fields]
    if missing:
        raise ValueError(f"{path}: missing model fields {missing}")
    try:
        mu_mode = MuMode(fields["mu_mode"])
    except ValueError:
        raise ValueError(f"{path}: unknown mu_mode {fields['mu_mode']!r}")
    return EfopaModel(
        coefficients=ExpFitCoefficients(
            a=float(fields["a"]),
            b=float(fields["b"]),
            c=float(fields["c"]),
            d=float(fields["d"]),
        ),
        h_ref=float(fields["h_ref"]),
        p_ref=float(fields["p_ref"]),
        h0=float(fields["h0"]),
        mu_mode=mu_mode,
        clamp_floor=float(fields["clamp_floor"]),
    )

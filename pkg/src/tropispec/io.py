"""Loading inputs and writing reports.

Reports are JSON with every float written with 17 significant digits, or
CSV preceded by a version line ``# tropispec-v1 ...``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .core import ConeMatrix
from .errors import InputError
from .hadamard import EnsembleConfig
from .kernels import KernelSpec
from .maxpoly import PosPolynomial

__all__ = [
    "FORMAT_VERSION",
    "load_json",
    "load_matrix",
    "load_polynomial",
    "load_kernel",
    "load_config",
    "format_float",
    "dumps",
    "csv_text",
]

FORMAT_VERSION = "tropispec-v1"


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def load_matrix(path) -> ConeMatrix:
    return ConeMatrix.from_json(load_json(path))


def load_polynomial(arg: str) -> PosPolynomial:
    """``arg`` is either ``"a0,a1,..."`` or the path of a polynomial JSON file."""
    if arg.strip().endswith(".json") or Path(arg).is_file():
        return PosPolynomial.from_json(load_json(arg))
    return PosPolynomial.parse(arg)


def load_kernel(path) -> KernelSpec:
    return KernelSpec.from_json(load_json(path))


def load_config(path) -> EnsembleConfig:
    return EnsembleConfig.from_json(load_json(path))


def format_float(x: float) -> str:
    """17 significant digits; non-finite values as ``inf``, ``-inf``, ``nan``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no literal for non-finite numbers
        return format_float(x) if math.isfinite(x) else json.dumps(format_float(x))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17-digit floats."""
    return _encode(obj)


def csv_text(header: dict, fields, rows) -> str:
    """CSV with a version line carrying ``header`` as ``key=value`` pairs."""
    buf = io.StringIO()
    meta = " ".join(f"{k}={format_float(v) if isinstance(v, float) else v}" for k, v in header.items())
    buf.write(f"# {FORMAT_VERSION} {meta}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()

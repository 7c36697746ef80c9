"""Semiring matrix arithmetic on the nonnegative cone of R^n.

Two semirings are supported.  In ``max-times`` the sum of two numbers is
their maximum, so a matrix acts on a vector by ``y_i = max_j A_ij x_j``;
in ``plus-times`` the usual sum is used.  Vectors are plain float
``numpy`` arrays with nonnegative entries, matrices are wrapped in
:class:`ConeMatrix` so that the semiring travels with the data.

The cone carries the sup-norm throughout.  Long products are computed in
the log domain (zero entries become ``-inf``) and stored as a
:class:`ScaledPower`, which keeps the largest entry at 1 and moves the
magnitude into a scalar log scale.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InputError

__all__ = [
    "Semiring",
    "ConeMatrix",
    "ScaledPower",
    "cone_vector",
    "mat_apply",
    "mat_mul",
    "mat_power",
    "op_norm",
    "min_modulus",
    "hadamard_product",
    "hadamard_power",
    "vec_join",
    "lemma_good_holds",
    "safe_log",
    "maxplus_matmul",
    "log_matmul",
    "log_apply",
]

# Upper bound on elements materialised by a broadcast product; larger
# products are split into row blocks.
_BLOCK_ELEMENTS = 1 << 22


class Semiring(str, enum.Enum):
    MAX_TIMES = "max-times"
    PLUS_TIMES = "plus-times"

    @classmethod
    def parse(cls, value: "Semiring | str") -> "Semiring":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise InputError(f"unknown semiring {value!r}") from None


def safe_log(a) -> np.ndarray:
    """Elementwise natural log with ``log(0) = -inf`` and no warnings."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(a)


def _checked_entries(entries, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what} entries are not numeric: {exc}") from None
    if arr.ndim != ndim:
        raise InputError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError(f"{what} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} entries must be finite")
    if np.any(arr < 0):
        raise InputError(f"{what} entries must be nonnegative")
    return arr


def cone_vector(x) -> np.ndarray:
    """Validate and copy a nonnegative finite vector."""
    arr = _checked_entries(x, 1, "vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ConeMatrix:
    """Square nonnegative matrix tagged with the semiring it acts in."""

    entries: np.ndarray
    semiring: Semiring = Semiring.MAX_TIMES

    def __post_init__(self):
        arr = _checked_entries(self.entries, 2, "matrix")
        if arr.shape[0] != arr.shape[1]:
            raise InputError(f"matrix must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "semiring", Semiring.parse(self.semiring))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def log_entries(self) -> np.ndarray:
        out = safe_log(self.entries)
        out.setflags(write=False)
        return out

    @classmethod
    def identity(cls, n: int, semiring=Semiring.MAX_TIMES) -> "ConeMatrix":
        return cls(np.eye(n), semiring)

    @classmethod
    def zeros(cls, n: int, semiring=Semiring.MAX_TIMES) -> "ConeMatrix":
        return cls(np.zeros((n, n)), semiring)

    def with_entries(self, entries) -> "ConeMatrix":
        return ConeMatrix(entries, self.semiring)

    def scaled(self, c: float) -> "ConeMatrix":
        return ConeMatrix(self.entries * c, self.semiring)

    def __eq__(self, other):
        if not isinstance(other, ConeMatrix):
            return NotImplemented
        return self.semiring == other.semiring and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self):
        rows = np.array2string(self.entries, precision=6, separator=", ")
        return f"ConeMatrix({rows}, semiring={self.semiring.value!r})"

    def to_json(self) -> dict:
        return {
            "semiring": self.semiring.value,
            "n": self.n,
            "rows": self.entries.tolist(),
        }

    @classmethod
    def from_json(cls, data) -> "ConeMatrix":
        """Build from ``{"semiring": ..., "n": ..., "rows": [[...], ...]}``."""
        if not isinstance(data, dict) or "rows" not in data:
            raise InputError("matrix JSON must be an object with a 'rows' field")
        rows = data["rows"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise InputError("'rows' must be a list of lists")
        if any(len(r) != len(rows) for r in rows):
            raise InputError("matrix rows must form a square array")
        if any(isinstance(v, bool) for r in rows for v in r):
            raise InputError("matrix entries must be numbers")
        m = cls(rows, Semiring.parse(data.get("semiring", "max-times")))
        if "n" in data and data["n"] != m.n:
            raise InputError(f"declared n={data['n']} does not match {m.n} rows")
        return m


def _require_same(A: ConeMatrix, B: ConeMatrix):
    if A.n != B.n:
        raise InputError(f"dimension mismatch: {A.n} vs {B.n}")
    if A.semiring != B.semiring:
        raise InputError(f"semiring mismatch: {A.semiring.value} vs {B.semiring.value}")


# -- log-domain kernels -----------------------------------------------------


def maxplus_matmul(LA: np.ndarray, LB: np.ndarray) -> np.ndarray:
    """``C_ij = max_k LA_ik + LB_kj`` with ``-inf`` as the additive zero."""
    n, k = LA.shape
    m = LB.shape[1]
    out = np.empty((n, m))
    step = max(1, _BLOCK_ELEMENTS // max(1, k * m))
    for lo in range(0, n, step):
        block = LA[lo : lo + step, :, None] + LB[None, :, :]
        out[lo : lo + step] = block.max(axis=1)
    return out


def _logsumexp_matmul(LA: np.ndarray, LB: np.ndarray) -> np.ndarray:
    n, k = LA.shape
    m = LB.shape[1]
    out = np.empty((n, m))
    step = max(1, _BLOCK_ELEMENTS // max(1, k * m))
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, n, step):
            block = LA[lo : lo + step, :, None] + LB[None, :, :]
            out[lo : lo + step] = logsumexp(block, axis=1)
    return out


def log_matmul(LA: np.ndarray, LB: np.ndarray, semiring: Semiring) -> np.ndarray:
    if semiring is Semiring.MAX_TIMES:
        return maxplus_matmul(LA, LB)
    return _logsumexp_matmul(LA, LB)


def log_apply(LA: np.ndarray, lx: np.ndarray, semiring: Semiring) -> np.ndarray:
    """Apply a log-domain matrix to a log-domain vector."""
    if semiring is Semiring.MAX_TIMES:
        return (LA + lx[None, :]).max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return logsumexp(LA + lx[None, :], axis=1)


# -- basic operations -------------------------------------------------------


def mat_apply(A: ConeMatrix, x) -> np.ndarray:
    x = cone_vector(x)
    if x.shape[0] != A.n:
        raise InputError(f"dimension mismatch: matrix {A.n}, vector {x.shape[0]}")
    if A.semiring is Semiring.MAX_TIMES:
        return (A.entries * x[None, :]).max(axis=1)
    return A.entries @ x


def mat_mul(A: ConeMatrix, B: ConeMatrix) -> ConeMatrix:
    """Semiring product ``AB``, so that ``(AB)x = A(Bx)``."""
    _require_same(A, B)
    if A.semiring is Semiring.MAX_TIMES:
        a, b = A.entries, B.entries
        out = np.empty_like(a)
        step = max(1, _BLOCK_ELEMENTS // (A.n * A.n))
        for lo in range(0, A.n, step):
            out[lo : lo + step] = (a[lo : lo + step, :, None] * b[None, :, :]).max(axis=1)
        return ConeMatrix(out, A.semiring)
    return ConeMatrix(A.entries @ B.entries, A.semiring)


def op_norm(A: ConeMatrix) -> float:
    """Operator norm on the sup-norm cone: max entry (max-times) or max row sum."""
    if A.semiring is Semiring.MAX_TIMES:
        return float(A.entries.max())
    return float(A.entries.sum(axis=1).max())


def min_modulus(A: ConeMatrix) -> float:
    """``inf ||Ax||`` over unit cone vectors, equal to the smallest column maximum."""
    return float(A.entries.max(axis=0).min())


def hadamard_product(A: ConeMatrix, B: ConeMatrix) -> ConeMatrix:
    _require_same(A, B)
    return ConeMatrix(A.entries * B.entries, A.semiring)


def hadamard_power(A: ConeMatrix, gamma: float) -> ConeMatrix:
    if not gamma > 0:
        raise InputError(f"Hadamard exponent must be positive, got {gamma}")
    return ConeMatrix(np.power(A.entries, gamma), A.semiring)


def vec_join(xs: Sequence) -> np.ndarray:
    """Elementwise maximum of a nonempty list of vectors."""
    if len(xs) == 0:
        raise InputError("cannot join an empty list of vectors")
    arrs = [cone_vector(x) for x in xs]
    if len({a.shape for a in arrs}) != 1:
        raise InputError("vectors to join must share a dimension")
    return np.max(np.stack(arrs), axis=0)


def lemma_good_holds(x, y, s: float, tol: float = 1e-9) -> bool:
    """Check, on one instance, that ``max(x, y) = s x`` with ``s > 1`` forces ``y = s x``.

    Returns False only if the premise holds (to ``tol``) while the
    conclusion fails (to ``tol * (1 + s)``).
    """
    if not s > 1:
        raise InputError(f"s must exceed 1, got {s}")
    if tol < 0:
        raise InputError("tol must be nonnegative")
    x = cone_vector(x)
    y = cone_vector(y)
    premise = np.max(np.abs(np.maximum(x, y) - s * x)) <= tol
    conclusion = np.max(np.abs(y - s * x)) <= tol * (1 + s)
    return bool(not premise or conclusion)


# -- powers -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScaledPower:
    """``A**exponent`` stored as ``exp(log_scale) * base`` with ``max(base) == 1``.

    ``log_base`` holds the natural log of ``base`` (``-inf`` for zero
    entries).  The zero matrix has ``log_scale == -inf`` and an all
    ``-inf`` ``log_base``.
    """

    log_base: np.ndarray
    log_scale: float
    exponent: int
    semiring: Semiring

    @classmethod
    def from_log(cls, L: np.ndarray, exponent: int, semiring: Semiring) -> "ScaledPower":
        top = L.max()
        if not np.isfinite(top):
            return cls(np.full_like(L, -np.inf), -np.inf, exponent, semiring)
        return cls(L - top, float(top), exponent, semiring)

    @property
    def is_zero(self) -> bool:
        return self.log_scale == -np.inf

    @property
    def base(self) -> ConeMatrix:
        return ConeMatrix(np.exp(self.log_base), self.semiring)

    def log_entries(self) -> np.ndarray:
        return self.log_base + self.log_scale if not self.is_zero else self.log_base.copy()

    def matrix(self) -> ConeMatrix:
        """The represented matrix in linear scale; may overflow for large exponents."""
        with np.errstate(over="raise"):
            return ConeMatrix(np.exp(self.log_entries()), self.semiring)

    def log_norm(self) -> float:
        if self.is_zero:
            return -np.inf
        if self.semiring is Semiring.MAX_TIMES:
            return self.log_scale  # max entry of base is exactly 1
        with np.errstate(divide="ignore"):
            return self.log_scale + float(logsumexp(self.log_base, axis=1).max())

    def log_min_modulus(self) -> float:
        if self.is_zero:
            return -np.inf
        return self.log_scale + float(self.log_base.max(axis=0).min())

    def log_apply(self, lx: np.ndarray) -> np.ndarray:
        """Log of ``A**exponent x`` given ``lx = log(x)``."""
        if self.is_zero:
            return np.full(self.log_base.shape[0], -np.inf)
        return self.log_scale + log_apply(self.log_base, lx, self.semiring)


def _renormalized_product(
    X: tuple[np.ndarray, float], Y: tuple[np.ndarray, float], semiring: Semiring
) -> tuple[np.ndarray, float]:
    (LX, sx), (LY, sy) = X, Y
    L = log_matmul(LX, LY, semiring)
    top = L.max()
    if not np.isfinite(top):
        return np.full_like(L, -np.inf), -np.inf
    return L - top, sx + sy + float(top)


def mat_power(A: ConeMatrix, n: int) -> ScaledPower:
    """``A**n`` by repeated squaring in the log domain.

    The base is renormalised to max entry 1 after every product, so no
    intermediate leaves the range of a double for ``n`` up to ``2**40``
    and beyond.
    """
    n = int(n)
    if n < 1:
        raise InputError(f"power must be a positive integer, got {n}")
    first = ScaledPower.from_log(np.array(A.log_entries), 1, A.semiring)
    if first.is_zero:
        return ScaledPower(first.log_base, -np.inf, n, A.semiring)
    square = (first.log_base, first.log_scale)
    acc = None
    k = n
    while True:
        if k & 1:
            acc = square if acc is None else _renormalized_product(acc, square, A.semiring)
            if not np.isfinite(acc[1]):
                break
        k >>= 1
        if not k:
            break
        square = _renormalized_product(square, square, A.semiring)
        if not np.isfinite(square[1]):
            acc = square
            break
    L, scale = acc
    if not np.isfinite(scale):
        return ScaledPower(np.full_like(L, -np.inf), -np.inf, n, A.semiring)
    return ScaledPower(L, scale, n, A.semiring)

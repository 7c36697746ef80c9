"""Maxpolynomials of max-times matrices.

A polynomial ``q(z) = sum a_j z^j`` with ``a_j >= 0`` acts on scalars as
``q(t) = max_j a_j t^j`` and on a max-times matrix as the entrywise
maximum ``max_j a_j A^j`` (with ``A^0 = I``).  The verifiers compare the
spectra of ``q(A)`` with the images of the spectra of ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import ConeMatrix, Semiring
from .errors import InputError, UnsupportedOperation
from .spectral import bonsall_radius, lower_radius, point_spectrum

__all__ = [
    "PosPolynomial",
    "MappingReport",
    "MappingCheck",
    "eval_scalar",
    "eval_operator",
    "power_coeffs",
    "verify_point_mapping",
    "verify_radius_mapping",
    "verify_lower_mapping",
    "fixed_point_lift",
]

SET_TOL = 1e-9
RADIUS_TOL = 1e-9
LOWER_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class PosPolynomial:
    """Polynomial with nonnegative coefficients ``coeffs[j]`` of ``z^j``."""

    coeffs: np.ndarray

    def __post_init__(self):
        try:
            c = np.array(self.coeffs, dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise InputError(f"polynomial coefficients must be numbers: {exc}") from None
        if c.size == 0:
            raise InputError("polynomial needs at least one coefficient")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InputError("polynomial coefficients must be finite and nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        """Largest index with a positive coefficient, ``-1`` for the zero polynomial."""
        nz = np.flatnonzero(self.coeffs > 0)
        return int(nz[-1]) if nz.size else -1

    @property
    def constant(self) -> float:
        return float(self.coeffs[0])

    def __eq__(self, other):
        if not isinstance(other, PosPolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __call__(self, t: float) -> float:
        return eval_scalar(self, t)

    def to_json(self) -> dict:
        return {"coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, obj) -> "PosPolynomial":
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise InputError('polynomial JSON must be an object with a "coeffs" list')
        coeffs = obj["coeffs"]
        if not isinstance(coeffs, list) or any(isinstance(a, bool) for a in coeffs):
            raise InputError('"coeffs" must be a list of numbers')
        return cls(coeffs)

    @classmethod
    def parse(cls, text: str) -> "PosPolynomial":
        """Parse the comma separated form ``"a0,a1,..."``."""
        parts = [p.strip() for p in str(text).split(",")]
        try:
            return cls([float(p) for p in parts])
        except ValueError:
            raise InputError(f"cannot parse polynomial {text!r}; expected a0,a1,...") from None


def eval_scalar(q: PosPolynomial, t: float) -> float:
    """``max_j a_j t^j`` with ``0^0 = 1``."""
    t = float(t)
    if not t >= 0:
        raise InputError(f"maxpolynomials are evaluated at t >= 0, got {t}")
    j = np.flatnonzero(q.coeffs > 0)
    if j.size == 0:
        return 0.0
    with np.errstate(over="ignore"):
        terms = q.coeffs[j] * np.float64(t) ** j
    return float(terms.max())


def eval_operator(q: PosPolynomial, A: ConeMatrix) -> ConeMatrix:
    """The matrix ``max_j a_j A^j`` (entrywise), ``A^0`` being the identity."""
    if A.semiring is not Semiring.MAX_TIMES:
        raise UnsupportedOperation("maxpolynomials of plus-times matrices do not preserve suprema")
    n = A.n
    P = np.eye(n)
    out = np.zeros((n, n))
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(q.degree + 1):
            if j > 0:
                P = (P[:, :, None] * A.entries[None, :, :]).max(axis=1)
            if q.coeffs[j] > 0:
                out = np.maximum(out, q.coeffs[j] * P)
    if not np.all(np.isfinite(out)):
        raise InputError("q(A) overflows double precision")
    return ConeMatrix(out, A.semiring)


def power_coeffs(q: PosPolynomial, m: int) -> PosPolynomial:
    """Coefficientwise power ``sum a_j^m z^j``."""
    if int(m) != m or m < 1:
        raise InputError(f"coefficient power must be a positive integer, got {m}")
    return PosPolynomial(q.coeffs ** int(m))


# -- spectral mapping -------------------------------------------------------


def _close(a: float, b: float, tol: float = SET_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _distinct(values) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or not _close(out[-1], v):
            out.append(float(v))
    return out


def _gap(src, dst) -> float:
    """Largest relative distance from a point of ``src`` to the nearest point of ``dst``."""
    worst = 0.0
    for a in src:
        if not dst:
            return np.inf
        worst = max(worst, min(abs(a - b) / max(1.0, abs(a), abs(b)) for b in dst))
    return worst


@dataclass(frozen=True)
class MappingReport:
    """Point spectrum of ``q(A)`` against the image of the point spectrum of ``A``.

    ``contains_forward``: ``q(sigma_p(A))`` lies in ``sigma_p(q(A))``.
    ``contains_backward``: ``sigma_p(q(A))`` lies in ``q(sigma_p(A))``
    together with the constant term when it is positive.  ``slack`` is the
    worst relative distance over both inclusions (0 when exact).
    ``constant_extra`` is True when the constant term shows up in
    ``sigma_p(q(A))`` without being an image point.
    """

    lhs_set: list[float]
    rhs_set: list[float]
    contains_forward: bool
    contains_backward: bool
    slack: float
    constant: float
    constant_extra: bool

    @property
    def equal(self) -> bool:
        return self.contains_forward and self.contains_backward and not self.constant_extra

    @property
    def passed(self) -> bool:
        """Both inclusions; set equality as well when the constant term is 0."""
        ok = self.contains_forward and self.contains_backward
        return ok and (self.constant > 0 or self.equal)

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs_set,
            "rhs": self.rhs_set,
            "contains_forward": self.contains_forward,
            "contains_backward": self.contains_backward,
            "slack": self.slack,
            "constant_extra": self.constant_extra,
            "passed": self.passed,
        }


class MappingCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


def verify_point_mapping(A: ConeMatrix, q: PosPolynomial) -> MappingReport:
    lhs = _distinct(p.value for p in point_spectrum(eval_operator(q, A)))
    rhs = _distinct(eval_scalar(q, p.value) for p in point_spectrum(A))
    a0 = q.constant
    allowed = _distinct(rhs + [a0]) if a0 > 0 else rhs
    fwd = _gap(rhs, lhs)
    back = _gap(lhs, allowed)
    extra = a0 > 0 and any(_close(v, a0) for v in lhs) and not any(_close(v, a0) for v in rhs)
    return MappingReport(
        lhs_set=lhs,
        rhs_set=rhs,
        contains_forward=fwd <= SET_TOL,
        contains_backward=back <= SET_TOL,
        slack=float(max(fwd, back)),
        constant=a0,
        constant_extra=bool(extra),
    )


def verify_radius_mapping(A: ConeMatrix, q: PosPolynomial) -> MappingCheck:
    """``r(q(A))`` against ``q(r(A))``, equal within ``1e-9 max(1, rhs)``."""
    lhs, _ = bonsall_radius(eval_operator(q, A))
    rhs = eval_scalar(q, bonsall_radius(A)[0])
    return MappingCheck(lhs, rhs, abs(lhs - rhs) <= RADIUS_TOL * max(1.0, rhs))


def verify_lower_mapping(A: ConeMatrix, q: PosPolynomial) -> MappingCheck:
    """``d(q(A))`` against ``q(d(A))``, equal within ``1e-6`` relative."""
    lhs, _ = lower_radius(eval_operator(q, A))
    rhs = eval_scalar(q, lower_radius(A)[0])
    return MappingCheck(lhs, rhs, abs(lhs - rhs) <= LOWER_RTOL * max(1.0, rhs))


def fixed_point_lift(A: ConeMatrix, q: PosPolynomial, x) -> np.ndarray:
    """Turn a fixed point of ``q(A)`` into a fixed point of ``A``.

    Requires ``a_0 = 0`` and ``q(1) = 1``.  With ``m`` the first index
    where ``a_m = 1``, the vector ``y = x v Ax v ... v A^(m-1) x`` satisfies
    ``Ay = y`` whenever ``q(A) x = x``.
    """
    if A.semiring is not Semiring.MAX_TIMES:
        raise UnsupportedOperation("fixed point lift needs a max-times matrix")
    if q.constant != 0:
        raise InputError("fixed point lift needs a zero constant term")
    if not _close(eval_scalar(q, 1.0), 1.0, 1e-12):
        raise InputError("fixed point lift needs q(1) = 1")
    m = int(np.flatnonzero(np.isclose(q.coeffs, 1.0, rtol=1e-12, atol=0))[0])
    v = np.asarray(x, dtype=float)
    y = v.copy()
    for _ in range(1, m):
        v = (A.entries * v[None, :]).max(axis=1)
        y = np.maximum(y, v)
    return y

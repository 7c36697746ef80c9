"""Band max-kernel operators on ``[0, a]`` and their grid discretisations.

The operator is ``(Ax)(s) = max over t in [alpha(s), beta(s)] of k(s, t) x(t)``.
On the uniform grid ``s_i = a i / (N - 1)`` it becomes a max-times matrix
whose entry ``(i, j)`` is ``k(s_i, t_j)`` when ``t_j`` lies in the band
widened by half a grid step on both sides, and 0 otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .core import ConeMatrix
from .errors import InputError
from .spectral import bonsall_radius, lower_radius

__all__ = [
    "Band",
    "KernelSpec",
    "DiscretizationResult",
    "RefinementRow",
    "discretize",
    "path_norm",
    "radius_refinement",
]

BAND_CHECK_POINTS = 4097


def _number(obj, key, default=None, positive=False, nonneg=False) -> float:
    if key not in obj:
        if default is None:
            raise InputError(f"missing field {key!r}")
        return float(default)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"field {key!r} must be a number")
    v = float(v)
    if not math.isfinite(v):
        raise InputError(f"field {key!r} must be finite")
    if positive and not v > 0:
        raise InputError(f"field {key!r} must be positive")
    if nonneg and v < 0:
        raise InputError(f"field {key!r} must be nonnegative")
    return v


@dataclass(frozen=True)
class Band:
    """Affine band edge ``s -> clamp(c0 + c1 s, 0, a)``."""

    c0: float
    c1: float = 0.0

    def __call__(self, s, a: float):
        return np.clip(self.c0 + self.c1 * np.asarray(s, dtype=float), 0.0, a)

    def to_json(self) -> dict:
        return {"c0": self.c0, "c1": self.c1}

    @classmethod
    def from_json(cls, obj) -> "Band":
        if not isinstance(obj, dict):
            raise InputError("band must be an object with c0 and c1")
        return cls(_number(obj, "c0"), _number(obj, "c1", 0.0))


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Kernel family, domain ``[0, a]`` and band ``[alpha(s), beta(s)]``.

    Families (``family["kind"]``):

    * ``constant``: ``k = c``
    * ``product``: ``k = c s^p t^q`` with ``p, q >= 0``
    * ``bump``: ``k = c exp(-(s - t)^2 / w)``
    * ``table``: samples on a uniform grid of ``[0, a]^2``, interpolated
      bilinearly (rows follow ``s``, columns follow ``t``)
    """

    a: float
    family: dict
    alpha: Band
    beta: Band

    def __post_init__(self):
        a = float(self.a)
        if not (math.isfinite(a) and a > 0):
            raise InputError(f"domain endpoint a must be positive, got {self.a!r}")
        object.__setattr__(self, "a", a)
        if not isinstance(self.family, dict) or "kind" not in self.family:
            raise InputError('family must be an object with a "kind" field')
        fam = dict(self.family)
        kind = fam["kind"]
        if kind == "constant":
            fam = {"kind": kind, "c": _number(fam, "c", nonneg=True)}
        elif kind == "product":
            fam = {
                "kind": kind,
                "p": _number(fam, "p", nonneg=True),
                "q": _number(fam, "q", nonneg=True),
                "c": _number(fam, "c", 1.0, nonneg=True),
            }
        elif kind == "bump":
            fam = {"kind": kind, "w": _number(fam, "w", positive=True), "c": _number(fam, "c", nonneg=True)}
        elif kind == "table":
            try:
                samples = np.array(fam.get("samples"), dtype=float)
            except (TypeError, ValueError):
                raise InputError("table samples must be a 2-d array of numbers") from None
            if samples.ndim != 2 or min(samples.shape) < 2:
                raise InputError("table samples must be at least 2 x 2")
            if not np.all(np.isfinite(samples)) or np.any(samples < 0):
                raise InputError("table samples must be finite and nonnegative")
            fam = {"kind": kind, "samples": samples.tolist()}
        else:
            raise InputError(f"unknown kernel family {kind!r}")
        object.__setattr__(self, "family", fam)
        s = np.linspace(0.0, a, BAND_CHECK_POINTS)
        if np.any(self.alpha(s, a) > self.beta(s, a)):
            raise InputError("band is empty somewhere: alpha(s) > beta(s)")

    def kernel(self, s, t) -> np.ndarray:
        """Evaluate ``k`` on broadcast arrays ``s`` and ``t``."""
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        f = self.family
        kind = f["kind"]
        if kind == "constant":
            return np.full(s.shape, f["c"])
        if kind == "product":
            return f["c"] * np.power(s, f["p"]) * np.power(t, f["q"])
        if kind == "bump":
            return f["c"] * np.exp(-((s - t) ** 2) / f["w"])
        samples = np.array(f["samples"])
        axes = (np.linspace(0.0, self.a, samples.shape[0]), np.linspace(0.0, self.a, samples.shape[1]))
        interp = RegularGridInterpolator(axes, samples, method="linear")
        pts = np.stack([np.clip(s, 0.0, self.a), np.clip(t, 0.0, self.a)], axis=-1)
        return interp(pts.reshape(-1, 2)).reshape(s.shape)

    def to_json(self) -> dict:
        return {"a": self.a, "family": dict(self.family), "alpha": self.alpha.to_json(), "beta": self.beta.to_json()}

    @classmethod
    def from_json(cls, obj) -> "KernelSpec":
        if not isinstance(obj, dict):
            raise InputError("kernel spec must be a JSON object")
        a = _number(obj, "a", positive=True)
        alpha = Band.from_json(obj.get("alpha", {"c0": 0.0, "c1": 0.0}))
        beta = Band.from_json(obj.get("beta", {"c0": a, "c1": 0.0}))
        return cls(a, obj.get("family"), alpha, beta)


@dataclass(frozen=True)
class DiscretizationResult:
    N: int
    matrix: ConeMatrix
    nodes: np.ndarray


def discretize(spec: KernelSpec, N: int) -> DiscretizationResult:
    """Collocation of the band operator on ``N`` uniform nodes, band rounded outward."""
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise InputError(f"grid size must be an integer >= 2, got {N!r}")
    N = int(N)
    a = spec.a
    nodes = a * np.arange(N) / (N - 1)
    h = a / (N - 1)
    slack = h / 2 + 1e-12 * a
    lo = spec.alpha(nodes, a)[:, None] - slack
    hi = spec.beta(nodes, a)[:, None] + slack
    inside = (nodes[None, :] >= lo) & (nodes[None, :] <= hi)
    K = spec.kernel(nodes[:, None], nodes[None, :])
    return DiscretizationResult(N, ConeMatrix(np.where(inside, K, 0.0)), nodes)


def path_norm(D: DiscretizationResult, n: int) -> float:
    """``b_n``: the largest product ``k(s_0, s_1) ... k(s_(n-1), s_n)`` over grid paths.

    Dynamic programming over path length, independent of matrix powers.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"path length must be a positive integer, got {n!r}")
    L = D.matrix.log_entries
    best = np.zeros(D.N)  # log of the best product of a path ending at each node
    for _ in range(int(n)):
        best = (best[:, None] + L).max(axis=0)
    return float(np.exp(best.max()))


@dataclass(frozen=True)
class RefinementRow:
    N: int
    r: float
    d: float
    dr: float
    dd: float


def radius_refinement(spec: KernelSpec, Ns) -> list[RefinementRow]:
    """``r`` and ``d`` of the discretisation for each grid size, with successive differences."""
    Ns = [int(N) for N in Ns]
    if not Ns:
        raise InputError("need at least one grid size")
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise InputError("grid sizes must be nondecreasing")
    rows: list[RefinementRow] = []
    for N in Ns:
        A = discretize(spec, N).matrix
        r, _ = bonsall_radius(A)
        d, _ = lower_radius(A)
        prev = rows[-1] if rows else None
        rows.append(RefinementRow(N, r, d, r - prev.r if prev else math.nan, d - prev.d if prev else math.nan))
    return rows

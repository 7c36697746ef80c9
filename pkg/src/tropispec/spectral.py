"""Spectral quantities of cone matrices.

Everything here is measured in the sup-norm on the nonnegative cone:

* ``r(A)``   Bonsall cone spectral radius, ``lim ||A^n||^(1/n)``
* ``d(A)``   lower spectral radius, ``lim m(A^n)^(1/n)`` with ``m`` the
  minimum modulus
* ``sigma_p`` eigenvalues with a nonnegative eigenvector
* ``rho(s)`` the approximate-point residual ``min ||Ax - sx||`` over
  unit cone vectors; ``s`` is in the approximate point spectrum iff it
  vanishes.

For max-times matrices ``r`` is the maximum cycle geometric mean and the
point spectrum is read off the Frobenius classes.  In finite dimension the
unit sphere of the cone is compact, so ``rho`` attains its infimum and the
approximate point spectrum coincides with ``sigma_p``; ``d`` is then the
smallest eigenvalue.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConeMatrix,
    mat_power,
    ScaledPower,
    Semiring,
    cone_vector,
    log_matmul,
    mat_apply,
    min_modulus,
    op_norm,
    safe_log,
)
from .errors import ConsistencyError, InputError, UnsupportedOperation
from .graph import FrobeniusClass, frobenius_classes

log = logging.getLogger(__name__)

__all__ = [
    "CycleCertificate",
    "Eigenpair",
    "EigenCandidate",
    "bonsall_radius",
    "norm_root_sequence",
    "min_modulus_root_sequence",
    "eigen_candidates",
    "point_spectrum",
    "lower_radius",
    "local_radius_sequence",
    "local_radius",
    "residual",
    "ap_residual",
    "ap_scan",
    "ScanPoint",
    "SpectrumReport",
    "analyze",
    "ApproxEigenvector",
    "approx_eigenvector",
]

MAX_DOUBLINGS = 40
EIGEN_TOL = 1e-9
# Relative gap allowed between min(sigma_p) and the doubling estimate of d.
LOWER_CHECK_RTOL = 1e-4


@dataclass(frozen=True)
class CycleCertificate:
    nodes: tuple[int, ...]
    geometric_mean: float

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes), "geometric_mean": self.geometric_mean}


@dataclass(frozen=True)
class Eigenpair:
    value: float
    vector: np.ndarray

    def __iter__(self):
        yield self.value
        yield self.vector


@dataclass(frozen=True)
class EigenCandidate:
    """Eigenvalue candidate attached to one Frobenius class."""

    value: float
    nodes: tuple[int, ...]
    accepted: bool
    vector: np.ndarray | None = None
    residual: float = np.nan
    reason: str = ""


def _require_max_times(A: ConeMatrix, what: str):
    if A.semiring is not Semiring.MAX_TIMES:
        raise UnsupportedOperation(f"{what} is only defined for max-times matrices")


def _check_k(K: int):
    if not 0 <= K <= MAX_DOUBLINGS:
        raise InputError(f"number of doublings must lie in [0, {MAX_DOUBLINGS}], got {K}")


def residual(A: ConeMatrix, x, s: float) -> float:
    """``||Ax - sx|| / ||x||`` in the sup-norm."""
    x = np.asarray(x, dtype=float)
    nx = np.max(x)
    if nx <= 0:
        raise InputError("residual needs a nonzero vector")
    return float(np.max(np.abs(mat_apply(A, x) - s * x)) / nx)


# -- radius -----------------------------------------------------------------


def _perron_root(A: np.ndarray) -> float:
    """Spectral radius of a nonnegative matrix by shifted power iteration.

    The shift by the identity makes the iteration aperiodic; the
    Collatz-Wielandt ratios bracket the root at every step.
    """
    n = A.shape[0]
    B = A + np.eye(n)
    x = np.ones(n)
    lo, hi = 0.0, np.inf
    for _ in range(20000):
        y = B @ x
        ratios = y / x
        lo, hi = max(lo, ratios.min()), min(hi, ratios.max())
        if hi - lo <= 1e-14 * hi:
            return max(0.0, 0.5 * (lo + hi) - 1.0)
        x = y / y.max()
    # slow convergence (reducible, close eigenvalues): take the eigensolver
    # value, kept inside the certified bracket
    rho = float(np.max(np.abs(np.linalg.eigvals(B))))
    return max(0.0, float(np.clip(rho, lo, hi)) - 1.0)


def _dominant_class(classes) -> FrobeniusClass | None:
    cyclic = [c for c in classes if not c.trivial]
    if not cyclic:
        return None
    top = max(c.mean for c in cyclic)
    tied = [c for c in cyclic if c.mean >= top * (1 - 1e-12)]
    return min(tied, key=lambda c: c.cycle)


def bonsall_radius(A: ConeMatrix) -> tuple[float, CycleCertificate | None]:
    """``r(A)`` with a witnessing cycle (max-times) or ``None``."""
    if A.semiring is Semiring.PLUS_TIMES:
        return float(_perron_root(A.entries)), None
    classes, _ = frobenius_classes(A.entries)
    best = _dominant_class(classes)
    if best is None:
        return 0.0, None
    return best.mean, CycleCertificate(best.cycle, best.mean)


def _chain_logs(A: ConeMatrix, K: int):
    """``ScaledPower`` of ``A^(2^k)`` for ``k = 0..K``, by repeated squaring."""
    P = ScaledPower.from_log(np.array(A.log_entries), 1, A.semiring)
    out = [P]
    for k in range(1, K + 1):
        if P.is_zero:
            P = ScaledPower(P.log_base, -np.inf, 2**k, A.semiring)
        else:
            Q = ScaledPower.from_log(log_matmul(P.log_base, P.log_base, A.semiring), 2**k, A.semiring)
            scale = Q.log_scale + 2 * P.log_scale if not Q.is_zero else -np.inf
            P = ScaledPower(Q.log_base, scale, 2**k, A.semiring)
        out.append(P)
    return out


def norm_root_sequence(A: ConeMatrix, K: int = 20) -> list[float]:
    """``[||A^(2^k)||^(1/2^k) for k = 0..K]``; nonincreasing, bounded below by ``r(A)``."""
    _check_k(K)
    seq = [float(np.exp(P.log_norm() / P.exponent)) for P in _chain_logs(A, K)]
    seq[0] = op_norm(A)
    return seq


def min_modulus_root_sequence(A: ConeMatrix, K: int = 20) -> list[float]:
    """``[m(A^(2^k))^(1/2^k) for k = 0..K]``; nondecreasing, bounded above by ``d(A)``."""
    _check_k(K)
    seq = [float(np.exp(P.log_min_modulus() / P.exponent)) for P in _chain_logs(A, K)]
    seq[0] = min_modulus(A)
    return seq


def local_radius_sequence(A: ConeMatrix, x, K: int = 20) -> list[float]:
    """``[||A^(2^k) x||^(1/2^k) for k = 0..K]`` for a nonzero cone vector ``x``."""
    _check_k(K)
    x = cone_vector(x)
    if x.shape[0] != A.n:
        raise InputError(f"dimension mismatch: matrix {A.n}, vector {x.shape[0]}")
    if not np.any(x > 0):
        raise InputError("local radius needs a nonzero vector")
    lx = safe_log(x)
    lx0 = lx.max()
    out = []
    for P in _chain_logs(A, K):
        ly = P.log_apply(lx - lx0)
        out.append(float(np.exp(ly.max() / P.exponent)))
    return out


def local_radius(A: ConeMatrix, x, K: int = 20) -> float:
    """Estimate of ``limsup ||A^n x||^(1/n)`` at ``n = 2^K``."""
    return local_radius_sequence(A, x, K)[-1]


# -- point spectrum ---------------------------------------------------------


def _eigenvector(A: ConeMatrix, lam: float, node: int) -> np.ndarray:
    """Path-maximum vector ``x_i = max_paths i->node weight / lam^len``."""
    L = A.log_entries - np.log(lam)
    lx = np.full(A.n, -np.inf)
    lx[node] = 0.0
    for _ in range(A.n):
        nxt = np.maximum(lx, (L + lx[None, :]).max(axis=1))
        if np.array_equal(nxt, lx):
            break
        lx = nxt
    x = np.exp(lx - lx.max())
    return x


def eigen_candidates(A: ConeMatrix) -> list[EigenCandidate]:
    """One candidate per Frobenius class, with the access criterion and verification.

    A class mean is accepted when no class with a larger mean has a path
    into it; an accepted candidate then gets an explicit eigenvector that
    must pass ``||Ax - lam x|| <= 1e-9 max(1, lam) ||x||``.
    """
    _require_max_times(A, "point spectrum")
    classes, access = frobenius_classes(A.entries)
    zero_cols = np.flatnonzero(A.entries.max(axis=0) == 0)
    out = []
    for b, cls in enumerate(classes):
        lam = cls.mean
        upstream = [classes[a].mean for a in range(len(classes)) if a != b and access[a, b]]
        if upstream and max(upstream) > lam * (1 + 1e-12):
            out.append(EigenCandidate(lam, cls.nodes, False, reason="dominated by an upstream class"))
            continue
        if lam == 0.0:
            # every upstream class is acyclic, so some zero column feeds this class
            feeders = [int(j) for j in zero_cols if access[_class_of(classes, j), b]]
            if not feeders:
                out.append(EigenCandidate(lam, cls.nodes, False, reason="no zero column upstream"))
                continue
            x = np.zeros(A.n)
            x[feeders[0]] = 1.0
        else:
            x = _eigenvector(A, lam, cls.cycle[0])
        res = residual(A, x, lam)
        ok = res <= EIGEN_TOL * max(1.0, lam)
        reason = "" if ok else f"verification failed (residual {res:.3e})"
        if not ok:
            log.warning("rejecting eigenvalue candidate %r on class %s: %s", lam, cls.nodes, reason)
        out.append(EigenCandidate(lam, cls.nodes, ok, x, res, reason))
    return out


def _class_of(classes, node: int) -> int:
    for i, c in enumerate(classes):
        if node in c.nodes:
            return i
    raise KeyError(node)


def point_spectrum(A: ConeMatrix) -> list[Eigenpair]:
    """Distinct eigenvalues in increasing order, each with one eigenvector."""
    pairs: list[Eigenpair] = []
    for c in sorted((c for c in eigen_candidates(A) if c.accepted), key=lambda c: c.value):
        if pairs and c.value <= pairs[-1].value * (1 + 1e-12):
            continue
        pairs.append(Eigenpair(c.value, c.vector))
    return pairs


# -- lower radius -----------------------------------------------------------


def lower_radius(A: ConeMatrix, K: int = 20) -> tuple[float, str]:
    """``d(A)`` and the method tag used to obtain it.

    Max-times: smallest eigenvalue, cross-checked against the doubling
    sequence of minimum moduli (a certified lower bound).  Plus-times:
    the doubling sequence value itself.
    """
    seq = min_modulus_root_sequence(A, K)[-1]
    if A.semiring is Semiring.PLUS_TIMES:
        return seq, "lower-bound-fekete"
    spec = point_spectrum(A)
    if not spec:
        return 0.0, "empty-point-spectrum"
    d = spec[0].value
    scale = max(abs(d), np.finfo(float).tiny)
    if seq > d * (1 + 1e-9) + 1e-300:
        raise ConsistencyError(f"certified lower bound {seq!r} exceeds smallest eigenvalue {d!r}")
    if d - seq > LOWER_CHECK_RTOL * scale:
        raise ConsistencyError(f"smallest eigenvalue {d!r} and doubling estimate {seq!r} disagree")
    return d, "min-point-spectrum"


# -- approximate point spectrum ---------------------------------------------


def _line_candidates(b: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Nonnegative abscissae where any two of the lines ``±(b + m t)`` or 0 meet."""
    B = np.concatenate([b, -b, [0.0]])
    M = np.concatenate([m, -m, [0.0]])
    dM = M[:, None] - M[None, :]
    dB = B[None, :] - B[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = dB / dM
    t = t[np.isfinite(t)]
    return t[t >= 0]


def _coordinate_step(A: np.ndarray, maxtimes: bool, x: np.ndarray, k: int, s: float):
    """Exact minimisation of ``||Ax - sx|| / ||x||`` over ``x_k >= 0``."""
    n = x.shape[0]
    others = np.delete(np.arange(n), k)
    Mk = x[others].max() if n > 1 else 0.0
    if Mk <= 0:
        return None
    a = A[:, k]
    if maxtimes:
        c = (A[:, others] * x[others][None, :]).max(axis=1)
    else:
        c = A[:, others] @ x[others]
    q0 = s * x.copy()
    q0[k] = 0.0
    qs = np.zeros(n)
    qs[k] = s
    if maxtimes:
        b = np.concatenate([c - q0, -q0])
        m = np.concatenate([-qs, a - qs])
        with np.errstate(divide="ignore", invalid="ignore"):
            switch = np.where(a > 0, c / a, np.nan)
        extra = switch[np.isfinite(switch)]
    else:
        b = c - q0
        m = a - qs
        extra = np.empty(0)
    if n <= 32:
        ts = _line_candidates(b, m)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = -b / m
        ts = z[np.isfinite(z) & (z >= 0)]
        ts = np.concatenate([ts, np.linspace(0, 2 * Mk, 65)])
    top = max(1.0, Mk, float(ts.max()) if ts.size else 0.0)
    ts = np.unique(np.concatenate([ts, extra, [0.0, Mk, x[k], 4 * top]]))
    ts = ts[ts >= 0]
    if maxtimes:
        P = np.maximum(c[None, :], ts[:, None] * a[None, :])
    else:
        P = c[None, :] + ts[:, None] * a[None, :]
    Q = q0[None, :] + ts[:, None] * qs[None, :]
    f = np.abs(P - Q).max(axis=1) / np.maximum(Mk, ts)
    i = int(np.argmin(f))
    return ts[i], f[i]


def _descend(A: ConeMatrix, x: np.ndarray, s: float, max_sweeps: int = 200):
    maxtimes = A.semiring is Semiring.MAX_TIMES
    M = A.entries
    x = x / x.max()
    best = residual(A, x, s)
    for _ in range(max_sweeps):
        start = best
        for k in range(A.n):
            step = _coordinate_step(M, maxtimes, x, k, s)
            if step is None:
                continue
            t, val = step
            if val < best - 1e-15:
                x = x.copy()
                x[k] = t
                x = x / x.max()
                best = residual(A, x, s)
        if start - best < 1e-12 or best == 0.0:
            break
    return best, x


def ap_residual(
    A: ConeMatrix, s: float, restarts: int = 32, seed: int = 0
) -> tuple[float, np.ndarray]:
    """Upper bound on ``rho(s) = min ||Ax - sx||`` over ``x >= 0, ||x|| = 1``.

    Multi-start cyclic coordinate descent; every coordinate move is an exact
    one-dimensional minimisation of the piecewise-linear objective.  Starts
    are the basis vectors, the max-times eigenvectors and seeded random
    points.  Deterministic for a given seed.
    """
    if s < 0:
        raise InputError(f"s must be nonnegative, got {s}")
    starts = [np.eye(A.n)[j] for j in range(A.n)]
    if A.semiring is Semiring.MAX_TIMES:
        starts += [p.vector for p in point_spectrum(A)]
    rng = np.random.default_rng(seed)
    while len(starts) < restarts:
        starts.append(rng.uniform(0.0, 1.0, A.n) + 1e-3)
    best_val, best_x = np.inf, None
    for x0 in starts:
        val, x = _descend(A, np.asarray(x0, dtype=float), s)
        if val < best_val:
            best_val, best_x = val, x
        if best_val == 0.0:
            break
    return float(best_val), best_x


@dataclass(frozen=True)
class ScanPoint:
    s: float
    rho: float
    member: bool

    def to_json(self) -> dict:
        return {"s": self.s, "rho": self.rho, "member": self.member}


def ap_scan(A: ConeMatrix, grid_points: int = 21, tol: float = 1e-9, seed: int = 0) -> list[ScanPoint]:
    """Residual scan over ``[0.9 d(A), 1.1 r(A)]`` plus the eigenvalues themselves."""
    if grid_points < 2:
        raise InputError("grid_points must be at least 2")
    r, _ = bonsall_radius(A)
    d, _ = lower_radius(A)
    grid = list(np.linspace(0.9 * d, 1.1 * r, grid_points))
    extra = [d, r]
    if A.semiring is Semiring.MAX_TIMES:
        extra += [p.value for p in point_spectrum(A)]
    points = sorted(set(float(v) for v in grid + extra))
    out = []
    for s in points:
        rho, _ = ap_residual(A, s, seed=seed)
        out.append(ScanPoint(s, rho, rho <= tol * max(1.0, s)))
    return out


# -- full report ------------------------------------------------------------


@dataclass
class SpectrumReport:
    r: float
    d: float
    d_method: str
    sigma_p: list[Eigenpair]
    scan: list[ScanPoint]
    local_radii: list[float]
    certificates: list[CycleCertificate] = field(default_factory=list)

    def violations(self, tol: float = 1e-9) -> list[str]:
        """Broken ordering or eigenpair invariants (empty when consistent)."""
        bad = []
        vals = [p.value for p in self.sigma_p]
        scale = max(1.0, self.r)
        if vals:
            if self.d > min(vals) + tol * scale:
                bad.append("d exceeds the smallest eigenvalue")
            if max(vals) > self.r + tol * scale:
                bad.append("largest eigenvalue exceeds r")
        if self.d > self.r + tol * scale:
            bad.append("d exceeds r")
        return bad

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "d": self.d,
            "d_method": self.d_method,
            "sigma_p": [{"lambda": p.value, "x": p.vector.tolist()} for p in self.sigma_p],
            "local_radii": self.local_radii,
            "scan": [pt.to_json() for pt in self.scan],
            "certificates": [c.to_json() for c in self.certificates],
        }


def analyze(
    A: ConeMatrix, grid_points: int = 21, tol: float = 1e-9, seed: int = 0, K: int = 20
) -> SpectrumReport:
    r, cert = bonsall_radius(A)
    d, method = lower_radius(A, K)
    sigma = point_spectrum(A) if A.semiring is Semiring.MAX_TIMES else []
    for p in sigma:
        res = residual(A, p.vector, p.value)
        if res > EIGEN_TOL * max(1.0, p.value):
            raise ConsistencyError(f"eigenpair for {p.value!r} has residual {res!r}")
    local = [local_radius(A, np.eye(A.n)[j], K) for j in range(A.n)]
    scan = ap_scan(A, grid_points, tol, seed)
    report = SpectrumReport(r, d, method, sigma, scan, local, [cert] if cert else [])
    bad = report.violations(tol)
    if bad:
        raise ConsistencyError("; ".join(bad))
    return report


# -- constructive approximate eigenvector -------------------------------------

# blocks of length n examined before a start vector is abandoned
MAX_BLOCKS = 64
START_POWER = 1 << 10


@dataclass(frozen=True)
class ApproxEigenvector:
    """A unit vector ``w`` with ``||A'w - w|| <= epsilon ||w||`` for ``A' = A / d(A)``.

    ``trace`` records the block length ``n``, the number ``N`` of powers
    computed, the selected block index ``m``, the branch taken (``"y"``
    or ``"u"``) and which start vector succeeded.
    """

    vector: np.ndarray
    epsilon: float
    residual: float
    trace: dict

    def to_json(self) -> dict:
        return {
            "vector": self.vector.tolist(),
            "epsilon": self.epsilon,
            "residual": self.residual,
            "trace": dict(self.trace),
        }


def _block_length(eps: float, semiring: Semiring) -> int:
    c = 16.0 if semiring is Semiring.MAX_TIMES else 32.0
    # strictly above c / eps^2 even when the quotient rounds down
    return max(3, int(np.floor(c / eps**2 * (1 + 1e-12))) + 1)


def _orbit(B: np.ndarray, maxtimes: bool, x: np.ndarray, steps: int):
    """Normalised iterates ``B^i x`` (max entry 1) and their log norms, ``i = 0..steps``."""
    V = np.empty((steps + 1, x.shape[0]))
    logs = np.empty(steps + 1)
    top = x.max()
    V[0], logs[0] = x / top, np.log(top)
    v, lv = V[0], logs[0]
    for i in range(1, steps + 1):
        w = (B * v[None, :]).max(axis=1) if maxtimes else B @ v
        top = w.max()
        if top <= 0:
            return V[:i], logs[:i]
        v = w / top
        lv = lv + np.log(top)
        V[i], logs[i] = v, lv
    return V, logs


def _weighted_join(V, logs, weights, maxtimes: bool) -> np.ndarray:
    """``join_i weights[i] B^i x`` (or the sum), returned with max entry 1."""
    lw = np.log(weights) + logs
    lw = lw - lw.max()
    scaled = V * np.exp(lw)[:, None]
    out = scaled.max(axis=0) if maxtimes else scaled.sum(axis=0)
    return out / out.max()


def _construct(B: np.ndarray, maxtimes: bool, x: np.ndarray, n: int):
    """Find the block index ``m`` from ``x``; ``None`` if none appears within the horizon."""
    V, logs = _orbit(B, maxtimes, x, 2 * n)
    for m in range(1, MAX_BLOCKS + 1):
        need = (m + 1) * n + 1
        if V.shape[0] < need:
            if V.shape[0] < need - n:
                return None  # orbit died: B is nilpotent on x
            more, more_logs = _orbit(B, maxtimes, V[-1], n)
            V = np.concatenate([V, more[1:]])
            logs = np.concatenate([logs, more_logs[1:] + logs[-1]])
            if V.shape[0] < need:
                return None
        a_prev, a_m, a_next = logs[(m - 1) * n], logs[m * n], logs[(m + 1) * n]
        if a_m >= np.log(0.25) + max(a_prev, a_next):
            return m, V.shape[0] - 1, V[(m - 1) * n : (m + 1) * n], logs[(m - 1) * n : (m + 1) * n], a_m
    return None


def _log_norm_join(V, logs, maxtimes: bool) -> float:
    top = logs.max()
    scaled = V * np.exp(logs - top)[:, None]
    agg = scaled.max(axis=0) if maxtimes else scaled.sum(axis=0)
    return float(np.log(agg.max()) + top)


def approx_eigenvector(A: ConeMatrix, eps: float, seed: int = 0, restarts: int = 8) -> ApproxEigenvector:
    """Unit cone vector ``w`` with ``||A'w - w|| <= eps`` where ``A' = A / d(A)``.

    Block construction with block length ``n > 16 / eps^2`` (``32 / eps^2``
    for plus-times).  Starting from ``x``, the norms
    ``a_j = ||A'^(jn) x||`` are computed until some ``m >= 1`` satisfies
    ``a_m >= max(a_(m-1), a_(m+1)) / 4``.  Then

    * ``y = join(A'^i x, (m-1)n <= i < (m+1)n)`` (the sum for plus-times)
      is returned when ``||y|| >= 8 a_m / eps``;
    * otherwise the tent ``u`` with weights ``(t+1)/n`` on
      ``A'^((m-1)n+t) x`` and ``(n-1-t)/n`` on ``A'^(mn+t) x`` is returned.

    The first start is the basis vector of the column with the smallest
    maximum in ``A^1024``; further starts are seeded random unit vectors.

    Raises
    ------
    UnsupportedOperation
        If ``d(A) = 0``.
    ConsistencyError
        If no start yields a vector within ``eps``.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise InputError(f"epsilon must lie in (0, 1), got {eps}")
    d, _ = lower_radius(A)
    if d <= 0.0:
        raise UnsupportedOperation("approximate eigenvector needs d(A) > 0")
    maxtimes = A.semiring is Semiring.MAX_TIMES
    B = np.array(A.entries) / d
    Bm = ConeMatrix(B, A.semiring)
    n = _block_length(eps, A.semiring)

    P = mat_power(A, START_POWER)
    col = int(np.argmin(P.log_base.max(axis=0)))
    starts = [("basis", np.eye(A.n)[col])]
    rng = np.random.default_rng(seed)
    for k in range(restarts):
        starts.append((f"random-{k}", rng.random(A.n) + 1e-3))

    best = None
    for label, x in starts:
        x = x / x.max()
        found = _construct(B, maxtimes, x, n)
        if found is None:
            continue
        m, N, Vb, lb, a_m = found
        if _log_norm_join(Vb, lb, maxtimes) >= np.log(8.0 / eps) + a_m:
            w, branch = _weighted_join(Vb, lb, np.ones(len(lb)), maxtimes), "y"
        else:
            t = np.arange(n)
            weights = np.concatenate([(t + 1) / n, (n - 1 - t[: n - 1]) / n, [0.0]])
            keep = weights > 0
            w = _weighted_join(Vb[keep], lb[keep], weights[keep], maxtimes)
            branch = "u"
        res = residual(Bm, w, 1.0)
        trace = {"n": n, "N": N, "m": m, "branch": branch, "start": label}
        cand = ApproxEigenvector(w, eps, res, trace)
        if res <= eps:
            return cand
        if best is None or res < best.residual:
            best = cand
    if best is None:
        raise ConsistencyError("no block satisfying the growth condition was found")
    raise ConsistencyError(f"best residual {best.residual!r} exceeds epsilon {eps!r}")

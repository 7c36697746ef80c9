"""Exhaustive reference computations for max-times matrices of size <= 3.

Nothing in this module uses Karp's algorithm, Frobenius classes or Kleene
stars.  Cycles and paths are enumerated, eigenvectors are found by trying
every support and every choice of maximising column per row, and
residuals are minimised over a dense grid on the unit sphere of the cone.
It is slow on purpose and only meant for tests.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import ConeMatrix, Semiring
from .errors import InputError
from .spectral import CycleCertificate, Eigenpair, ScanPoint, SpectrumReport

__all__ = ["simple_cycles", "brute_force_oracle", "oracle_residual", "oracle_min_modulus"]

ACCEPT_RTOL = 1e-7


def simple_cycles(n: int):
    """All simple cycles of the complete digraph on ``n`` nodes, smallest node first."""
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            head, rest = combo[0], combo[1:]
            for perm in itertools.permutations(rest):
                yield (head,) + perm


def _cycle_means(E: np.ndarray) -> dict[tuple[int, ...], float]:
    out = {}
    for cyc in simple_cycles(E.shape[0]):
        w = [E[cyc[i], cyc[(i + 1) % len(cyc)]] for i in range(len(cyc))]
        if min(w) > 0:
            out[cyc] = float(np.prod(w)) ** (1.0 / len(cyc))
    return out


def _reaches(E: np.ndarray) -> np.ndarray:
    """``R[i, j]``: some path (possibly empty) leads from ``i`` to ``j``, by enumeration."""
    n = E.shape[0]
    R = np.eye(n, dtype=bool)
    for i, j in itertools.product(range(n), range(n)):
        for k in range(n - 1):
            for mids in itertools.permutations([v for v in range(n) if v not in (i, j)], k):
                path = (i,) + mids + (j,)
                if all(E[path[t], path[t + 1]] > 0 for t in range(len(path) - 1)):
                    R[i, j] = True
    return R


def _eig_residual(E: np.ndarray, lam: float, X: np.ndarray) -> np.ndarray:
    """Relative residuals ``||Ex - lam x|| / max(1, lam)`` for rows of ``X`` (max(x) = 1)."""
    AX = (E[None, :, :] * X[:, None, :]).max(axis=2)
    return np.abs(AX - lam * X).max(axis=1) / max(1.0, lam)


def _solve_pattern(E: np.ndarray, lam: float, support: tuple[int, ...], choice: tuple[int, ...]):
    """Eigenvector on ``support`` where row ``support[k]`` attains its max at ``choice[k]``.

    In log coordinates the choice gives equalities ``u_i - u_c = log(A_ic / lam)``
    and every other entry an inequality ``u_j - u_i <= log(lam / A_ij)``.
    The equalities form a functional graph; each of its components is fixed
    up to an offset, and the offsets solve a tiny difference-constraint
    system by Bellman-Ford.  Returns ``None`` when infeasible.
    """
    loglam = np.log(lam)
    succ = {i: c for i, c in zip(support, choice)}
    # walk each node to its component cycle and fix u relative to a root
    u: dict[int, float] = {}
    comp: dict[int, int] = {}
    roots = []
    for start in support:
        if start in u:
            continue
        path = [start]
        while path[-1] not in u and succ[path[-1]] not in path:
            path.append(succ[path[-1]])
        if path[-1] in u:
            anchor = path.pop()
        else:
            # close the cycle: its log-weights must sum to zero
            first = path.index(succ[path[-1]])
            cyc = path[first:]
            total = sum(np.log(E[v, succ[v]]) - loglam for v in cyc)
            if abs(total) > 1e-9 * max(1.0, abs(loglam)) * len(cyc):
                return None
            anchor = cyc[0]
            u[anchor] = 0.0
            comp[anchor] = len(roots)
            roots.append(anchor)
            path = path[:first] + cyc[1:]
        # u_i = u_succ(i) + log(A_i,succ / lam), resolved from the anchor outward
        pending = list(path)
        while pending:
            for v in list(pending):
                if succ[v] in u:
                    u[v] = u[succ[v]] + np.log(E[v, succ[v]]) - loglam
                    comp[v] = comp[succ[v]]
                    pending.remove(v)
    k = len(roots)
    # offsets c: u_j + c_b - u_i - c_a <= log(lam / A_ij)  =>  c_b - c_a <= bound
    bound = np.full((k, k), np.inf)
    for i in support:
        for j in support:
            if E[i, j] > 0:
                a, b = comp[i], comp[j]
                val = loglam - np.log(E[i, j]) - u[j] + u[i]
                if a == b:
                    if val < -1e-9 * max(1.0, abs(loglam)):
                        return None
                else:
                    bound[a, b] = min(bound[a, b], val)
    dist = np.zeros(k)
    for _ in range(k + 1):
        changed = False
        for a in range(k):
            for b in range(k):
                if dist[a] + bound[a, b] < dist[b] - 1e-12:
                    dist[b] = dist[a] + bound[a, b]
                    changed = True
        if not changed:
            break
    else:
        return None
    x = np.zeros(E.shape[0])
    for v in support:
        x[v] = u[v] + dist[comp[v]]
    x[list(support)] = np.exp(x[list(support)] - max(x[list(support)]))
    return x


def _has_eigenvector(E: np.ndarray, lam: float):
    """Exhaustive search over supports and argmax patterns; returns ``(residual, x)``."""
    n = E.shape[0]
    best = (np.inf, None)
    for k in range(1, n + 1):
        for support in itertools.combinations(range(n), k):
            outside = [i for i in range(n) if i not in support]
            # rows outside the support must see nothing of it
            if outside and E[np.ix_(outside, support)].max() > 0:
                continue
            if lam == 0.0:
                x = np.zeros(n)
                x[list(support)] = 1.0
                val = float(_eig_residual(E, lam, x[None, :])[0])
                if val < best[0]:
                    best = (val, x)
                continue
            options = [[j for j in support if E[i, j] > 0] for i in support]
            if any(not opt for opt in options):
                continue
            for choice in itertools.product(*options):
                x = _solve_pattern(E, lam, support, choice)
                if x is None:
                    continue
                val = float(_eig_residual(E, lam, x[None, :])[0])
                if val < best[0]:
                    best = (val, x)
                if val <= ACCEPT_RTOL:
                    return best
    return best


def _face_grid(axis: np.ndarray, n: int, p: int) -> np.ndarray:
    """Grid points of the face ``{x_p = 1}`` of the unit sup-norm sphere."""
    if n == 1:
        return np.ones((1, 1))
    grid = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    X = np.ones((grid.shape[0], n))
    X[:, [j for j in range(n) if j != p]] = grid
    return X


def oracle_residual(E: np.ndarray, s: float, resolution: int = 200) -> tuple[float, np.ndarray]:
    """``min ||Ex - sx||`` over a dense grid on the faces ``{x_p = 1}`` of the unit sphere."""
    n = E.shape[0]
    axis = np.linspace(0.0, 1.0, resolution + 1)
    best = (np.inf, None)
    for p in range(n):
        X = _face_grid(axis, n, p)
        AX = (E[None, :, :] * X[:, None, :]).max(axis=2)
        vals = np.abs(AX - s * X).max(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best[0]:
            best = (float(vals[i]), X[i])
    return best


def oracle_min_modulus(E: np.ndarray, resolution: int = 200) -> float:
    """``min ||Ex||`` over the same sphere grid (no closed form used)."""
    n = E.shape[0]
    axis = np.linspace(0.0, 1.0, resolution + 1)
    best = np.inf
    for p in range(n):
        X = _face_grid(axis, n, p)
        AX = (E[None, :, :] * X[:, None, :]).max(axis=2)
        best = min(best, float(AX.max(axis=1).min()))
    return best


def brute_force_oracle(A: ConeMatrix, grid_resolution: int = 200, scan_points: int = 9) -> SpectrumReport:
    """Independent ``r``, ``d``, ``sigma_p`` and residual scan for ``n <= 3``.

    * ``r``: largest geometric mean over all enumerated simple cycles.
    * ``d``: the growth rate of the column maxima of ``A^n``, i.e. the
      minimum over columns ``j`` of the best cycle mean among cycles that
      have a path to ``j`` (0 when no cycle reaches ``j``).
    * ``sigma_p``: every cycle mean and 0 is a candidate; a candidate is
      kept when some support and argmax pattern yields a vector with
      relative residual below ``1e-7``.
    * scan: the sphere-grid residual (``grid_resolution`` steps per axis)
      at ``scan_points`` values of ``s`` spread over ``[0.9 d, 1.1 r]`` and
      at every eigenvalue; ``scan_points=0`` skips the scan.  A point is a
      member when the grid minimum is within the Lipschitz bound
      ``(||A|| + s) h / 2`` of zero.
    """
    if A.semiring is not Semiring.MAX_TIMES:
        raise InputError("the oracle handles max-times matrices only")
    if A.n > 3:
        raise InputError("the oracle is limited to n <= 3")
    E = A.entries
    n = A.n
    means = _cycle_means(E)
    if means:
        best_cycle = min(means, key=lambda c: (-means[c], c))
        r = means[best_cycle]
        certs = [CycleCertificate(best_cycle, r)]
    else:
        r, certs = 0.0, []

    R = _reaches(E)
    col_rates = []
    for j in range(n):
        rates = [m for c, m in means.items() if any(R[v, j] for v in c)]
        col_rates.append(max(rates) if rates else 0.0)
    d = min(col_rates)

    sigma = []
    for lam in sorted(set(means.values()) | {0.0}):
        if sigma and lam <= sigma[-1].value * (1 + 1e-12):
            continue
        val, x = _has_eigenvector(E, lam)
        if val <= ACCEPT_RTOL:
            sigma.append(Eigenpair(lam, x))

    scan = []
    if scan_points > 0:
        s_values = set(np.linspace(0.9 * d, 1.1 * r, scan_points).tolist())
        s_values |= {p.value for p in sigma}
        h = 0.5 / grid_resolution
        norm = float(E.max())
        for s in sorted(s_values):
            rho, _ = oracle_residual(E, float(s), grid_resolution)
            # a grid point lies within h of any point on a face; rho is Lipschitz with constant ||A|| + s
            scan.append(ScanPoint(float(s), rho, rho <= (norm + s) * h * (1 + 1e-9)))
    local = [max(col_rates[j], 0.0) for j in range(n)]
    return SpectrumReport(r, d, "oracle-column-growth", sigma, scan, local, certs)

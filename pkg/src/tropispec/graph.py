"""Weighted digraph machinery for max-times matrices.

A matrix ``A`` is read as a digraph with an edge ``i -> j`` of log-weight
``log A_ij`` whenever ``A_ij > 0``.  Strongly connected components are the
Frobenius classes; each class carries its maximum cycle geometric mean,
found with Karp's algorithm in the log domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "FrobeniusClass",
    "strong_components",
    "reachability",
    "karp_max_mean",
    "critical_cycle",
    "cycle_geometric_mean",
    "frobenius_classes",
]


def strong_components(adj: np.ndarray) -> list[tuple[int, ...]]:
    """Strongly connected components, each sorted, ordered by smallest node."""
    n = adj.shape[0]
    _, labels = connected_components(csr_matrix(adj.astype(np.int8)), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(int(labels[v]), []).append(v)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def reachability(adj: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure: ``R[i, j]`` iff there is a path ``i ->* j``."""
    n = adj.shape[0]
    R = adj.astype(bool) | np.eye(n, dtype=bool)
    while True:
        Rf = R.astype(float)
        nxt = (Rf @ Rf) > 0
        if np.array_equal(nxt, R):
            return R
        R = nxt


def karp_max_mean(L: np.ndarray) -> float:
    """Maximum cycle mean of log-weights ``L`` (``-inf`` = no edge).

    Uses Karp's recurrence with an implicit super-source, so the graph
    need not be strongly connected.  Returns ``-inf`` for acyclic graphs.
    """
    n = L.shape[0]
    D = np.full((n + 1, n), -np.inf)
    D[0] = 0.0
    for k in range(1, n + 1):
        D[k] = (D[k - 1][:, None] + L).max(axis=0)
    finite_n = np.isfinite(D[n])
    if not finite_n.any():
        return -np.inf
    ks = np.arange(n)[:, None]
    with np.errstate(invalid="ignore"):
        ratios = (D[n][None, :] - D[:n]) / (n - ks)
    ratios = np.where(np.isfinite(D[:n]), ratios, np.inf)
    per_node = ratios.min(axis=0)
    return float(per_node[finite_n].max())


def _maxplus_closure(W: np.ndarray) -> np.ndarray:
    """Max path weights over paths of length >= 1 (Floyd-Warshall in max-plus)."""
    S = W.copy()
    for k in range(W.shape[0]):
        S = np.maximum(S, S[:, k : k + 1] + S[k : k + 1, :])
    return S


def critical_cycle(L: np.ndarray, mean: float, tol: float | None = None) -> tuple[int, ...] | None:
    """Lexicographically smallest simple cycle whose log-mean attains ``mean``.

    The cycle is returned starting at its smallest node.  ``None`` if no
    cycle is found within ``tol`` (the caller widens the tolerance).
    """
    n = L.shape[0]
    W = L - mean
    finite = np.isfinite(W)
    if not finite.any():
        return None
    if tol is None:
        tol = 64 * np.finfo(float).eps * n * (1.0 + float(np.abs(W[finite]).max()))
    S = _maxplus_closure(W)
    back = S.copy()
    np.fill_diagonal(back, np.maximum(np.diag(back), 0.0))
    crit = finite & (W + back.T >= -tol)
    nodes = [i for i in range(n) if crit[i].any()]
    if not nodes:
        return None
    start = nodes[0]
    path = [start]
    visited = {start}
    u = start
    while True:
        if crit[u, start]:
            return tuple(path)
        nxt = None
        for v in np.flatnonzero(crit[u]):
            v = int(v)
            if v in visited:
                continue
            if _reaches(crit, v, start, visited):
                nxt = v
                break
        if nxt is None:
            return None
        path.append(nxt)
        visited.add(nxt)
        u = nxt


def _reaches(crit: np.ndarray, src: int, dst: int, blocked: set[int]) -> bool:
    stack = [src]
    seen = {src}
    while stack:
        u = stack.pop()
        if crit[u, dst]:
            return True
        for v in np.flatnonzero(crit[u]):
            v = int(v)
            if v not in seen and v not in blocked:
                seen.add(v)
                stack.append(v)
    return False


def cycle_geometric_mean(entries: np.ndarray, cycle) -> float:
    """Geometric mean of the edge weights along ``cycle`` (closed implicitly)."""
    k = len(cycle)
    w = np.array([entries[cycle[i], cycle[(i + 1) % k]] for i in range(k)], dtype=float)
    if k == 1:
        return float(w[0])
    prod = float(np.prod(w))
    if prod > 0 and np.isfinite(prod) and prod > np.finfo(float).tiny:
        return prod ** (1.0 / k)
    with np.errstate(divide="ignore"):
        return float(np.exp(np.log(w).sum() / k))


@dataclass(frozen=True)
class FrobeniusClass:
    """A strongly connected class with its best cycle (``None`` if acyclic)."""

    nodes: tuple[int, ...]
    mean: float
    cycle: tuple[int, ...] | None

    @property
    def trivial(self) -> bool:
        return self.cycle is None


def _class_cycle(entries: np.ndarray, L: np.ndarray, nodes: tuple[int, ...]):
    idx = np.array(nodes)
    sub = L[np.ix_(idx, idx)]
    mu = karp_max_mean(sub)
    if mu == -np.inf:
        return 0.0, None
    cyc = None
    tol = None
    for _ in range(12):
        cyc = critical_cycle(sub, mu, tol)
        if cyc is not None:
            break
        finite = np.isfinite(sub)
        base = 64 * np.finfo(float).eps * len(nodes) * (1.0 + float(np.abs(sub[finite] - mu).max()))
        tol = (tol or base) * 10
    if cyc is None:
        raise RuntimeError("no critical cycle found for a cyclic class")
    cycle = tuple(int(idx[i]) for i in cyc)
    return cycle_geometric_mean(entries, cycle), cycle


def frobenius_classes(entries: np.ndarray) -> tuple[tuple[FrobeniusClass, ...], np.ndarray]:
    """Classes of a max-times matrix and their access relation.

    Returns ``(classes, access)`` where ``access[a, b]`` is True iff class
    ``a`` has a directed path to class ``b`` (reflexive).
    """
    entries = np.ascontiguousarray(entries, dtype=float)
    key = (entries.shape[0], entries.tobytes())
    return _frobenius_cached(key)


@lru_cache(maxsize=256)
def _frobenius_cached(key):
    n, raw = key
    entries = np.frombuffer(raw, dtype=float).reshape(n, n)
    adj = entries > 0
    with np.errstate(divide="ignore"):
        L = np.log(entries)
    comps = strong_components(adj)
    classes = []
    for nodes in comps:
        mean, cycle = _class_cycle(entries, L, nodes)
        classes.append(FrobeniusClass(nodes, mean, cycle))
    R = reachability(adj)
    reps = [c.nodes[0] for c in classes]
    access = R[np.ix_(reps, reps)]
    access.setflags(write=False)
    return tuple(classes), access

"""Randomised checks of spectral radius inequalities for Hadamard products.

Every check produces, per inequality, the left and right sides and a
normalised slack ``(rhs - lhs) / max(1, rhs)``.  These are theorems for
max-times matrices, so a slack below ``-1e-9`` is a bug, not a finding.
The commutation check ``r(AB) = r(BA)`` is an equality; its slack is
``-|lhs - rhs| / max(1, rhs)``.

Inequality ids:

``chain-entrywise``
    product over rows of the Hadamard-weighted row matrices is entrywise
    below the Hadamard product of the weighted column chains
``chain-radius``
    the radius of that product is below the weighted product of the chain
    radii
``hadamard-vs-cyclic``, ``cyclic-vs-product``
    ``r(A_1 o ... o A_m) <= r(P_1 o ... o P_m)^(1/m) <= r(A_1 ... A_m)``
    with ``P_i`` the cyclic products
``pair-hadamard-vs-mixed``, ``pair-mixed-vs-product``
    ``r(A o B) <= r(AB o BA)^(1/2) <= r(AB)``
``mixed-vs-squares``
    ``r(AB o BA) <= r(A^2 B^2)``
``product-commutation``
    ``r(AB) = r(BA)``

The ``poly-`` variants apply a maxpolynomial ``q`` (and ``q^[m]`` in the
middle term) to each side.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .core import ConeMatrix, Semiring, hadamard_power, hadamard_product, mat_mul
from .errors import InputError, UnsupportedOperation
from .maxpoly import PosPolynomial, eval_operator, power_coeffs
from .spectral import bonsall_radius

__all__ = [
    "InstanceRow",
    "InequalityReport",
    "EnsembleConfig",
    "cyclic_products",
    "verify_chain_products",
    "verify_cyclic_hadamard",
    "verify_poly_hadamard",
    "ensemble_run",
    "merge_reports",
    "CSV_FIELDS",
]

VIOLATION_TOL = 1e-9
STRICT_TOL = 1e-6
CSV_FIELDS = ("seed", "id", "lhs", "rhs", "slack")


def _radius(A: ConeMatrix) -> float:
    return bonsall_radius(A)[0]


def _digest(mats) -> str:
    h = hashlib.sha256()
    for M in mats:
        h.update(np.asarray(M.entries.shape, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(M.entries).tobytes())
    return h.hexdigest()[:16]


def _slack(lhs: float, rhs: float, equality: bool = False) -> float:
    gap = rhs - lhs
    if equality:
        gap = -abs(gap)
    return float(gap / max(1.0, abs(rhs))) + 0.0  # no negative zero in reports


@dataclass(frozen=True)
class InstanceRow:
    seed: int
    id: str
    lhs: float
    rhs: float
    slack: float


@dataclass
class InequalityReport:
    """Aggregated outcome of one inequality over an ensemble.

    ``violations`` holds digests of the inputs whose slack fell below
    ``-1e-9``.  ``strict`` counts instances with slack above ``1e-6`` and
    ``tight`` those within ``1e-6`` of equality; an ensemble that shows no
    instance of either kind is flagged ``insufficient``.
    """

    name: str
    equality: bool = False
    instances: int = 0
    min_slack: float = float("inf")
    min_positive_slack: float = float("inf")
    strict: int = 0
    tight: int = 0
    violations: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def add(self, seed: int, lhs: float, rhs: float, digest: str = "") -> "InequalityReport":
        s = _slack(lhs, rhs, self.equality)
        self.instances += 1
        self.min_slack = min(self.min_slack, s)
        if s > 0:
            self.min_positive_slack = min(self.min_positive_slack, s)
        if s > STRICT_TOL:
            self.strict += 1
        elif s >= -VIOLATION_TOL:
            self.tight += 1
        if s < -VIOLATION_TOL:
            self.violations.append(digest)
        self.seeds.append(int(seed))
        self.rows.append(InstanceRow(int(seed), self.name, float(lhs), float(rhs), s))
        return self

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def insufficient(self) -> bool:
        """Sharpness probe: inequalities should show strict and tight cases."""
        if self.equality:
            return False
        return self.instances > 0 and (self.strict == 0 or self.tight == 0)

    def merge(self, other: "InequalityReport") -> "InequalityReport":
        if other.name != self.name:
            raise InputError(f"cannot merge reports {self.name!r} and {other.name!r}")
        out = InequalityReport(self.name, self.equality)
        for rep in (self, other):
            out.instances += rep.instances
            out.strict += rep.strict
            out.tight += rep.tight
            out.violations += rep.violations
            out.seeds += rep.seeds
            out.rows += rep.rows
        out.min_slack = min(self.min_slack, other.min_slack)
        out.min_positive_slack = min(self.min_positive_slack, other.min_positive_slack)
        return out

    def summary(self) -> dict:
        return {
            "id": self.name,
            "kind": "equality" if self.equality else "inequality",
            "instances": self.instances,
            "min_slack": self.min_slack,
            "min_positive_slack": self.min_positive_slack,
            "strict": self.strict,
            "tight": self.tight,
            "insufficient": self.insufficient,
            "violations": list(self.violations),
            "passed": self.passed,
        }


def merge_reports(*groups) -> list[InequalityReport]:
    """Merge lists of reports by id, keeping first-seen order."""
    out: dict[str, InequalityReport] = {}
    for group in groups:
        for rep in group:
            out[rep.name] = out[rep.name].merge(rep) if rep.name in out else rep
    return list(out.values())


# -- building blocks --------------------------------------------------------


def _check_family(mats, what: str):
    if len(mats) == 0:
        raise InputError(f"{what} needs at least one matrix")
    n = mats[0].n
    for M in mats:
        if not isinstance(M, ConeMatrix):
            raise InputError(f"{what} expects ConeMatrix inputs")
        if M.semiring is not Semiring.MAX_TIMES:
            raise UnsupportedOperation(f"{what} is checked for max-times matrices only")
        if M.n != n:
            raise InputError(f"{what}: dimension mismatch ({M.n} vs {n})")


def _product(mats) -> ConeMatrix:
    return reduce(mat_mul, mats)


def _hadamard(mats) -> ConeMatrix:
    return reduce(hadamard_product, mats)


def cyclic_products(As) -> list[ConeMatrix]:
    """``P_i = A_i A_(i+1) ... A_m A_1 ... A_(i-1)`` for ``i = 1..m``."""
    As = list(As)
    _check_family(As, "cyclic products")
    return [_product(As[i:] + As[:i]) for i in range(len(As))]


def verify_chain_products(grid, alphas, seed: int = 0) -> list[InequalityReport]:
    """Row products of Hadamard-weighted matrices against weighted column chains.

    ``grid[i][j]`` is ``A_ij`` for rows ``i = 1..n`` and columns
    ``j = 1..m``.  Checks the entrywise bound and the radius bound.
    """
    grid = [list(row) for row in grid]
    if not grid or not grid[0]:
        raise InputError("grid must have at least one row and one column")
    m = len(grid[0])
    if any(len(row) != m for row in grid):
        raise InputError("grid rows must have equal length")
    alphas = [float(a) for a in alphas]
    if len(alphas) != m or any(not a > 0 for a in alphas):
        raise InputError("need one positive exponent per grid column")
    flat = [M for row in grid for M in row]
    _check_family(flat, "chain products")
    digest = _digest(flat)

    weighted_rows = [_hadamard([hadamard_power(M, a) for M, a in zip(row, alphas)]) for row in grid]
    lhs_mat = _product(weighted_rows)
    chains = [_product([row[j] for row in grid]) for j in range(m)]
    rhs_mat = _hadamard([hadamard_power(C, a) for C, a in zip(chains, alphas)])

    L, R = lhs_mat.entries, rhs_mat.entries
    slacks = (R - L) / np.maximum(1.0, R)
    k = np.unravel_index(int(np.argmin(slacks)), slacks.shape)
    entry = InequalityReport("chain-entrywise").add(seed, L[k], R[k], digest)

    rhs = float(np.prod([_radius(C) ** a for C, a in zip(chains, alphas)]))
    radius = InequalityReport("chain-radius").add(seed, _radius(lhs_mat), rhs, digest)
    return [entry, radius]


def _chain_reports(prefix: str, As, q: PosPolynomial | None, seed: int) -> list[InequalityReport]:
    m = len(As)
    digest = _digest(As)

    def qa(M, poly=q):
        return _radius(eval_operator(poly, M) if poly is not None else M)

    qm = power_coeffs(q, m) if q is not None else None
    r_had = qa(_hadamard(As))
    r_cyc = qa(_hadamard(cyclic_products(As)), qm) ** (1.0 / m)
    r_prod = qa(_product(As))
    out = [
        InequalityReport(prefix + "hadamard-vs-cyclic").add(seed, r_had, r_cyc, digest),
        InequalityReport(prefix + "cyclic-vs-product").add(seed, r_cyc, r_prod, digest),
    ]
    if m == 2:
        A, B = As
        AB, BA = mat_mul(A, B), mat_mul(B, A)
        q2 = power_coeffs(q, 2) if q is not None else None
        mixed = hadamard_product(AB, BA)
        r_mixed_half = qa(mixed, q2) ** 0.5
        out += [
            InequalityReport(prefix + "pair-hadamard-vs-mixed").add(seed, qa(hadamard_product(A, B)), r_mixed_half, digest),
            InequalityReport(prefix + "pair-mixed-vs-product").add(seed, r_mixed_half, qa(AB), digest),
            InequalityReport(prefix + "mixed-vs-squares").add(
                seed, qa(mixed), qa(mat_mul(mat_mul(A, A), mat_mul(B, B))), digest
            ),
        ]
        if q is None:
            out.append(InequalityReport("product-commutation", equality=True).add(seed, _radius(AB), _radius(BA), digest))
    return out


def verify_cyclic_hadamard(As, seed: int = 0) -> list[InequalityReport]:
    """Hadamard product against cyclic products and the plain product.

    For two matrices the pair inequalities and ``r(AB) = r(BA)`` are added.
    """
    As = list(As)
    _check_family(As, "cyclic Hadamard check")
    return _chain_reports("", As, None, seed)


def verify_poly_hadamard(q: PosPolynomial, As, seed: int = 0) -> list[InequalityReport]:
    """The same chain with ``q`` applied to every side (``q^[m]`` in the middle)."""
    As = list(As)
    _check_family(As, "maxpolynomial Hadamard check")
    return _chain_reports("poly-", As, q, seed)


# -- ensembles --------------------------------------------------------------


def _int_range(value, what: str) -> tuple[int, int]:
    if isinstance(value, str):
        parts = value.replace(":", "-").split("-")
        try:
            nums = [int(p) for p in parts if p.strip() != ""]
        except ValueError:
            raise InputError(f"{what}: cannot parse range {value!r}") from None
    elif isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        nums = [int(value)]
    else:
        try:
            nums = [int(v) for v in value]
        except (TypeError, ValueError):
            raise InputError(f"{what}: expected an integer range, got {value!r}") from None
    if len(nums) == 1:
        nums = nums * 2
    if len(nums) != 2 or nums[0] > nums[1]:
        raise InputError(f"{what}: expected lo <= hi, got {value!r}")
    return nums[0], nums[1]


@dataclass(frozen=True)
class EnsembleConfig:
    """Random ensemble for the Hadamard checks.

    Entries are log-uniform on ``[entry_low, entry_high]`` and each entry
    is zero with probability ``zero_prob``.  ``dims``, ``m_range``,
    ``rows_range`` and ``degree_range`` are inclusive integer ranges.
    """

    trials: int = 500
    seed: int = 0
    dims: tuple[int, int] = (1, 6)
    m_range: tuple[int, int] = (2, 3)
    rows_range: tuple[int, int] = (1, 3)
    degree_range: tuple[int, int] = (0, 3)
    entry_low: float = 1e-2
    entry_high: float = 1e2
    zero_prob: float = 0.2
    alpha_low: float = 0.2
    alpha_high: float = 2.0

    def __post_init__(self):
        for name, lo_min in (("dims", 1), ("m_range", 1), ("rows_range", 1), ("degree_range", 0)):
            lo, hi = _int_range(getattr(self, name), name)
            if lo < lo_min:
                raise InputError(f"{name} must start at {lo_min} or above")
            object.__setattr__(self, name, (lo, hi))
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 0:
            raise InputError(f"trials must be a nonnegative integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise InputError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if not 0 < self.entry_low <= self.entry_high < np.inf:
            raise InputError("entry range must satisfy 0 < low <= high < inf")
        if not 0 <= self.zero_prob < 1:
            raise InputError("zero_prob must lie in [0, 1)")
        if not 0 < self.alpha_low <= self.alpha_high < np.inf:
            raise InputError("alpha range must satisfy 0 < low <= high < inf")

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "dims": list(self.dims),
            "m_range": list(self.m_range),
            "rows_range": list(self.rows_range),
            "degree_range": list(self.degree_range),
            "entry_low": self.entry_low,
            "entry_high": self.entry_high,
            "zero_prob": self.zero_prob,
            "alpha_low": self.alpha_low,
            "alpha_high": self.alpha_high,
        }

    @classmethod
    def from_json(cls, data) -> "EnsembleConfig":
        if not isinstance(data, dict):
            raise InputError("ensemble config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown ensemble config keys: {sorted(unknown)}")
        return cls(**data)

    def trial_seeds(self) -> list[int]:
        if self.trials == 0:
            return []
        return [int(s) for s in np.random.SeedSequence(self.seed).generate_state(self.trials, dtype=np.uint32)]

    def random_matrix(self, rng: np.random.Generator, n: int) -> ConeMatrix:
        lo, hi = np.log(self.entry_low), np.log(self.entry_high)
        E = np.exp(rng.uniform(lo, hi, (n, n)))
        E[rng.random((n, n)) < self.zero_prob] = 0.0
        return ConeMatrix(E)

    def random_polynomial(self, rng: np.random.Generator) -> PosPolynomial:
        deg = int(rng.integers(self.degree_range[0], self.degree_range[1] + 1))
        c = rng.uniform(self.alpha_low, self.alpha_high, deg + 1)
        c[rng.random(deg + 1) < self.zero_prob] = 0.0
        c[-1] = max(c[-1], self.alpha_low)  # keep the requested degree
        return PosPolynomial(c)


def run_trial(config: EnsembleConfig, seed: int) -> list[InequalityReport]:
    """All checks on one instance drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(config.dims[0], config.dims[1] + 1))
    m = int(rng.integers(config.m_range[0], config.m_range[1] + 1))
    rows = int(rng.integers(config.rows_range[0], config.rows_range[1] + 1))
    grid = [[config.random_matrix(rng, n) for _ in range(m)] for _ in range(rows)]
    alphas = rng.uniform(config.alpha_low, config.alpha_high, m)
    As = [config.random_matrix(rng, n) for _ in range(m)]
    pair = [config.random_matrix(rng, n) for _ in range(2)]
    q = config.random_polynomial(rng)
    groups = [verify_chain_products(grid, alphas, seed), verify_cyclic_hadamard(As, seed)]
    if m != 2:
        groups.append(verify_cyclic_hadamard(pair, seed))
    groups.append(verify_poly_hadamard(q, As, seed))
    if m != 2:
        groups.append(verify_poly_hadamard(q, pair, seed))
    return merge_reports(*groups)


_ORDER = (
    "chain-entrywise",
    "chain-radius",
    "hadamard-vs-cyclic",
    "cyclic-vs-product",
    "pair-hadamard-vs-mixed",
    "pair-mixed-vs-product",
    "mixed-vs-squares",
    "product-commutation",
    "poly-hadamard-vs-cyclic",
    "poly-cyclic-vs-product",
    "poly-pair-hadamard-vs-mixed",
    "poly-pair-mixed-vs-product",
    "poly-mixed-vs-squares",
)


def ensemble_run(config: EnsembleConfig) -> list[InequalityReport]:
    """Run every check on ``config.trials`` instances; deterministic in ``config.seed``.

    With zero trials every report is empty and carries ``min_slack = inf``.
    """
    merged = {name: InequalityReport(name, equality=(name == "product-commutation")) for name in _ORDER}
    for seed in config.trial_seeds():
        for rep in run_trial(config, seed):
            merged[rep.name] = merged[rep.name].merge(rep)
    return [merged[name] for name in _ORDER]


def reports_to_json(config: EnsembleConfig, reports) -> str:
    body = {"config": config.to_json(), "reports": [r.summary() for r in reports]}
    return json.dumps(body, sort_keys=True)

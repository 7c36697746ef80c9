"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Random matrices come from the shared ensemble in ``conftest.py``
(log-uniform entries on [1e-2, 1e2], zero with probability 0.2).
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import random_matrix
from tropispec.core import ConeMatrix, lemma_good_holds, mat_apply, mat_power, min_modulus, op_norm, vec_join
from tropispec.hadamard import EnsembleConfig, ensemble_run
from tropispec.kernels import Band, KernelSpec, discretize, path_norm, radius_refinement
from tropispec.maxpoly import (
    PosPolynomial,
    verify_lower_mapping,
    verify_point_mapping,
    verify_radius_mapping,
)
from tropispec.oracle import brute_force_oracle
from tropispec.spectral import (
    ap_residual,
    approx_eigenvector,
    bonsall_radius,
    local_radius,
    lower_radius,
    min_modulus_root_sequence,
    norm_root_sequence,
    point_spectrum,
)

MONO_TOL = 1e-9


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny) if a != b else 0.0


def _ensemble(seed, count, n_max):
    rng = np.random.default_rng(seed)
    return [random_matrix(rng, n_max) for _ in range(count)]


def test_criterion_01_oracle_equivalence(acceptance):
    bad = []
    for k, A in enumerate(_ensemble(101, 500, 3)):
        o = brute_force_oracle(A, scan_points=0)
        r, _ = bonsall_radius(A)
        d, _ = lower_radius(A)
        sp = [p.value for p in point_spectrum(A)]
        osp = [p.value for p in o.sigma_p]
        ok = _rel(r, o.r) <= 1e-6 and _rel(d, o.d) <= 1e-6
        ok = ok and len(sp) == len(osp) and all(_rel(a, b) <= 1e-6 for a, b in zip(sp, osp))
        if not ok:
            bad.append(k)
    ok = acceptance(1, "oracle equivalence (500 matrices, n <= 3)", not bad, f"{len(bad)} disagreements")
    assert ok, f"disagreeing instances: {bad[:10]}"


@pytest.fixture(scope="module")
def ensemble_200():
    return _ensemble(202, 200, 8)


def test_criterion_02_radius_sequence(acceptance, ensemble_200):
    far, nonmono, worst = 0, 0, 0.0
    for A in ensemble_200:
        r, _ = bonsall_radius(A)
        seq = norm_root_sequence(A, 20)
        err = _rel(r, seq[-1])
        worst = max(worst, err)
        far += err > 1e-6
        nonmono += any(b > a * (1 + MONO_TOL) + MONO_TOL for a, b in zip(seq, seq[1:]))
    ok = acceptance(
        2,
        "radius vs norm-root sequence at K=20 (200 matrices, n <= 8)",
        far == 0 and nonmono == 0,
        f"{far} beyond 1e-6 (worst {worst:.2e}), {nonmono} non-monotone",
    )
    assert ok


def test_criterion_03_lower_radius(acceptance, ensemble_200):
    mismatch, far, nonmono, worst = 0, 0, 0, 0.0
    for A in ensemble_200:
        d, _ = lower_radius(A)
        sp = point_spectrum(A)
        if sp and _rel(sp[0].value, d) > 1e-12:
            mismatch += 1
        seq = min_modulus_root_sequence(A, 20)
        err = _rel(d, seq[-1])
        worst = max(worst, err)
        far += err > 1e-6
        nonmono += any(b < a * (1 - MONO_TOL) - MONO_TOL for a, b in zip(seq, seq[1:]))
    ok = acceptance(
        3,
        "lower radius = min sigma_p and min-modulus sequence at K=20",
        mismatch == 0 and far == 0 and nonmono == 0,
        f"{mismatch} min-sigma_p mismatches, {far} sequence gaps beyond 1e-6 (worst {worst:.2e}), {nonmono} non-monotone",
    )
    assert ok


def test_criterion_04_extremality(acceptance, ensemble_200):
    not_max, residual_fail, chain_fail, sat_fail, worst = 0, 0, 0, 0, 0.0
    for k, A in enumerate(ensemble_200):
        r, _ = bonsall_radius(A)
        d, _ = lower_radius(A)
        sp = point_spectrum(A)
        if _rel(sp[-1].value, r) > 1e-9:
            not_max += 1
        for s in (d, r):
            rho, _ = ap_residual(A, s, seed=k)
            residual_fail += rho > 1e-9 * max(1.0, s)
        radii = [local_radius(A, np.eye(A.n)[j], 20) for j in range(A.n)]
        tol = 1e-6 * max(1.0, r)
        chain_fail += not (d <= min(radii) + tol and max(radii) <= r + tol)
        err = _rel(max(radii), r)
        worst = max(worst, err)
        sat_fail += err > 1e-6
    ok = acceptance(
        4,
        "extremality: max sigma_p = r, residual 0 at d and r, ordering chain, basis saturation",
        not_max == 0 and residual_fail == 0 and chain_fail == 0 and sat_fail == 0,
        f"{not_max} max-sigma_p, {residual_fail} residual, {chain_fail} chain, "
        f"{sat_fail} saturation failures (worst {worst:.2e})",
    )
    assert ok


def test_criterion_05_spectral_mapping(acceptance):
    rng = np.random.default_rng(505)
    fails = {"radius": 0, "lower": 0, "point": 0}
    for _ in range(300):
        A = random_matrix(rng, 8)
        deg = int(rng.integers(0, 5))
        c = rng.uniform(0.2, 2.0, deg + 1)
        c[rng.random(deg + 1) < 0.3] = 0.0
        q = PosPolynomial(c)
        fails["radius"] += not verify_radius_mapping(A, q).passed
        fails["lower"] += not verify_lower_mapping(A, q).passed
        fails["point"] += not verify_point_mapping(A, q).passed
    ok = acceptance(5, "spectral mapping (300 random pairs, n <= 8, deg <= 4)", not any(fails.values()), str(fails))
    assert ok


def test_criterion_06_hadamard_suite(acceptance):
    reports = ensemble_run(EnsembleConfig(trials=500, seed=0))
    violations = {r.name: len(r.violations) for r in reports if r.violations}
    sharp = all(r.equality or (r.strict and r.tight) or r.insufficient for r in reports)
    flagged = [r.name for r in reports if r.insufficient]
    comm = next(r for r in reports if r.name == "product-commutation")
    ok = not violations and sharp and comm.min_slack >= -1e-9 and all(r.instances >= 500 for r in reports)
    acceptance(
        6,
        "Hadamard inequalities (500 instances)",
        ok,
        f"violations {violations or 'none'}, commutation min slack {comm.min_slack:.1e}, "
        f"flagged {flagged or 'none'}",
    )
    assert ok


def test_criterion_07_approx_eigenvector(acceptance):
    rng = np.random.default_rng(707)
    mats = []
    while len(mats) < 50:
        A = random_matrix(rng, 8)
        if lower_radius(A)[0] > 0:
            mats.append(A)
    fails, slow, worst = 0, 0, 0.0
    for A in mats:
        for eps in (0.2, 0.1, 0.05):
            t0 = time.perf_counter()
            res = approx_eigenvector(A, eps)
            slow += time.perf_counter() - t0 >= 5.0
            fails += res.residual > eps
            worst = max(worst, time.perf_counter() - t0)
    ok = acceptance(
        7, "constructive approximate eigenvector (50 matrices x 3 eps)", fails == 0 and slow == 0,
        f"{fails} residual failures, slowest run {worst:.2f} s",
    )
    assert ok


def _random_band_pair(rng):
    a = float(rng.uniform(0.5, 2.0))
    kind = rng.integers(0, 3)
    if kind == 0:
        fam = {"kind": "bump", "w": float(rng.uniform(0.05, 1.0)), "c": float(rng.uniform(0.5, 3.0))}
    elif kind == 1:
        fam = {"kind": "product", "p": float(rng.uniform(0, 2)), "q": float(rng.uniform(0, 2)), "c": 1.5}
    else:
        fam = {"kind": "table", "samples": rng.uniform(0.1, 3.0, (4, 5)).tolist()}
    c0, c1 = float(rng.uniform(-0.5, 0.5)) * a, float(rng.uniform(0.0, 1.5))
    w = float(rng.uniform(0.0, 0.3)) * a
    grow_lo, grow_hi = rng.uniform(0.0, 0.3, 2) * a
    small = KernelSpec(a, fam, Band(c0, c1), Band(c0 + w, c1))
    big = KernelSpec(a, fam, Band(c0 - grow_lo, c1), Band(c0 + w + grow_hi, c1))
    return small, big


def test_criterion_08_kernels(acceptance):
    const = KernelSpec.from_json({"a": 1.0, "family": {"kind": "constant", "c": 2.0}})
    table = radius_refinement(const, [8, 64, 256])
    exact = all(row.r == 2.0 and row.d == 2.0 for row in table)

    bump = KernelSpec.from_json(
        {"a": 1.0, "family": {"kind": "bump", "w": 0.3, "c": 1.7}, "alpha": {"c0": -0.2, "c1": 1}, "beta": {"c0": 0.3, "c1": 1}}
    )
    path_ok = True
    for spec in (const, bump):
        D = discretize(spec, 24)
        for n in range(1, 65):
            b = path_norm(D, n)
            ref = float(np.exp(mat_power(D.matrix, n).log_norm()))
            path_ok &= _rel(b, ref) <= 1e-9

    rng = np.random.default_rng(808)
    mono_fail = 0
    for _ in range(50):
        small, big = _random_band_pair(rng)
        r_small, _ = bonsall_radius(discretize(small, 24).matrix)
        r_big, _ = bonsall_radius(discretize(big, 24).matrix)
        mono_fail += r_big < r_small * (1 - 1e-12)
    ok = acceptance(
        8, "kernel discretisation", exact and path_ok and mono_fail == 0,
        f"constant exact {exact}, path norm identity {path_ok}, {mono_fail} monotonicity failures",
    )
    assert ok


def test_criterion_09_core_lattice(acceptance):
    rng = np.random.default_rng(909)
    trials = 10_000
    fails = dict.fromkeys(("birkhoff", "join", "join-norm", "lipschitz", "submult", "supermult", "lemma"), 0)
    for t in range(trials):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, 5))
        xs = rng.uniform(0, 10, (k, n)) * (rng.random((k, n)) > 0.2)
        ys = rng.uniform(0, 10, (k, n)) * (rng.random((k, n)) > 0.2)
        jx, jy = vec_join(list(xs)), vec_join(list(ys))
        fails["birkhoff"] += np.abs(jx - jy).max() > np.abs(xs - ys).max(axis=1).sum() + 1e-12
        fails["join"] += np.any(jx - jy > (xs - ys).max(axis=0) + 1e-12)
        lo = xs * rng.random((k, n))
        jl = vec_join(list(lo))
        fails["join-norm"] += np.abs(jx - jl).max() > (xs - lo).max(axis=0).max() + 1e-12

        A = ConeMatrix(rng.uniform(0, 10, (n, n)) * (rng.random((n, n)) > 0.2))
        x, y = rng.uniform(0, 1, n), rng.uniform(0, 1, n)
        fails["lipschitz"] += np.abs(mat_apply(A, x) - mat_apply(A, y)).max() > op_norm(A) * np.abs(x - y).max() + 1e-9

        p, q = (int(v) for v in rng.integers(1, 33, 2))
        Pp, Pq, Ppq = mat_power(A, p), mat_power(A, q), mat_power(A, p + q)
        if not Ppq.is_zero:
            fails["submult"] += Ppq.log_norm() > Pp.log_norm() + Pq.log_norm() + 1e-9
            lm = Pp.log_min_modulus() + Pq.log_min_modulus()
            fails["supermult"] += np.isfinite(lm) and Ppq.log_min_modulus() < lm - 1e-9

        s = float(rng.uniform(1.001, 5.0))
        xv = rng.uniform(0, 1, n) * (rng.random(n) > 0.2)
        yv = s * xv if t % 2 == 0 else rng.uniform(0, 5, n)
        fails["lemma"] += not lemma_good_holds(xv, yv, s)
    fails = {k: int(v) for k, v in fails.items()}
    ok = acceptance(9, "core lattice inequalities (10,000 trials each)", not any(fails.values()), str(fails))
    assert ok


def _cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "tropispec", *args], capture_output=True, text=True, cwd=cwd, check=False
    )
    return proc.returncode, proc.stdout


def test_criterion_10_cli_determinism(acceptance, tmp_path):
    (tmp_path / "m.json").write_text('{"semiring": "max-times", "rows": [[0.5, 2, 0], [3, 0, 1], [0, 4, 0.25]]}')
    (tmp_path / "k.json").write_text('{"a": 1, "family": {"kind": "bump", "w": 0.2, "c": 2}}')
    commands = [
        ["radius", "--input", "m.json"],
        ["spectrum", "--input", "m.json", "--seed", "3"],
        ["maxpoly", "--input", "m.json", "--poly", "0.5,1,0.25"],
        ["hadamard", "--trials", "20", "--seed", "7", "--dims", "1-4", "--degree", "0-2"],
        ["hadamard", "--trials", "20", "--seed", "7", "--format", "csv"],
        ["kernel", "--input", "k.json", "--grids", "8,16"],
        ["approx-eig", "--input", "m.json", "--eps", "0.1", "--seed", "5"],
    ]
    differ = []
    for cmd in commands:
        first, second = _cli(cmd, tmp_path), _cli(cmd, tmp_path)
        if first != second or first[0] != 0 or not first[1]:
            differ.append(cmd[0])
    ok = acceptance(10, "CLI determinism", not differ, f"differing or failing: {differ or 'none'}")
    assert ok

import numpy as np
import pytest

from conftest import random_matrix
from tropispec.core import ConeMatrix, Semiring, mat_apply, mat_power, vec_join
from tropispec.errors import InputError, UnsupportedOperation
from tropispec.maxpoly import (
    PosPolynomial,
    eval_operator,
    eval_scalar,
    fixed_point_lift,
    power_coeffs,
    verify_lower_mapping,
    verify_point_mapping,
    verify_radius_mapping,
)
from tropispec.spectral import ap_residual, point_spectrum, residual

SWAP = ConeMatrix([[0, 2], [3, 0]])
DIAG = ConeMatrix([[2, 0], [0, 3]])


def test_polynomial_validation_and_degree():
    assert PosPolynomial([1, 0, 2]).degree == 2
    assert PosPolynomial([1, 2, 0]).degree == 1
    assert PosPolynomial([0, 0]).degree == -1
    for bad in ([], [1, -1], [np.nan]):
        with pytest.raises(InputError):
            PosPolynomial(bad)
    assert PosPolynomial.parse("1, 0,2") == PosPolynomial([1, 0, 2])
    with pytest.raises(InputError):
        PosPolynomial.parse("1,x")
    assert PosPolynomial.from_json({"coeffs": [0, 1]}).degree == 1
    with pytest.raises(InputError):
        PosPolynomial.from_json({"coefs": [1]})


def test_eval_scalar():
    assert eval_scalar(PosPolynomial([0, 1]), 3.5) == 3.5
    assert eval_scalar(PosPolynomial([1, 0, 2]), 3) == 18
    assert eval_scalar(PosPolynomial([0, 0]), 5) == 0
    assert eval_scalar(PosPolynomial([4, 1]), 0) == 4  # 0^0 = 1
    with pytest.raises(InputError):
        eval_scalar(PosPolynomial([1]), -1)


def test_eval_scalar_monotone(rng):
    for _ in range(200):
        q = PosPolynomial(rng.uniform(0, 2, int(rng.integers(1, 6))))
        t, u = np.sort(rng.uniform(0, 10, 2))
        assert eval_scalar(q, t) <= eval_scalar(q, u)


def test_eval_operator_examples():
    assert eval_operator(PosPolynomial([0, 1]), SWAP) == SWAP
    assert eval_operator(PosPolynomial([1]), SWAP) == ConeMatrix.identity(2)
    assert eval_operator(PosPolynomial([1, 1]), SWAP).entries.tolist() == [[1, 2], [3, 1]]
    assert eval_operator(PosPolynomial([0]), SWAP) == ConeMatrix.zeros(2)
    with pytest.raises(UnsupportedOperation):
        eval_operator(PosPolynomial([1]), ConeMatrix([[1]], Semiring.PLUS_TIMES))


def test_operator_consistency(rng):
    for _ in range(30):
        A = random_matrix(rng, 6)
        q = PosPolynomial(rng.uniform(0, 2, int(rng.integers(1, 5))) * (rng.random(1) > 0.1))
        Q = eval_operator(q, A)
        for _ in range(100):
            x = rng.uniform(0, 1, A.n)
            parts = [q.coeffs[0] * x]
            parts += [q.coeffs[j] * mat_apply(mat_power(A, j).matrix(), x) for j in range(1, len(q.coeffs))]
            assert np.allclose(mat_apply(Q, x), vec_join(parts), rtol=1e-9, atol=0)


def test_power_coeffs():
    q = PosPolynomial([1, 2, 0])
    assert power_coeffs(q, 1) == q
    assert power_coeffs(PosPolynomial([1, 2]), 2) == PosPolynomial([1, 4])
    assert power_coeffs(q, 5).coeffs[2] == 0
    with pytest.raises(InputError):
        power_coeffs(q, 0)


def test_point_mapping_examples():
    rep = verify_point_mapping(DIAG, PosPolynomial([0, 0, 1]))
    assert rep.lhs_set == [4, 9] and rep.rhs_set == [4, 9] and rep.equal and rep.passed
    rep = verify_point_mapping(ConeMatrix.identity(2), PosPolynomial([0.5, 3]))
    assert 3 in rep.lhs_set
    rep = verify_point_mapping(ConeMatrix([[1, 4], [0, 2]]), PosPolynomial([3, 1]))
    assert rep.contains_forward and rep.contains_backward


def test_radius_and_lower_mapping_examples():
    chk = verify_radius_mapping(SWAP, PosPolynomial([1, 0, 1]))
    assert chk.passed and chk.lhs == pytest.approx(6) and chk.rhs == pytest.approx(6)
    chk = verify_radius_mapping(ConeMatrix.zeros(2), PosPolynomial([2.5, 1]))
    assert chk == (2.5, 2.5, True)
    chk = verify_lower_mapping(DIAG, PosPolynomial([1, 1]))
    assert chk.passed and chk.lhs == chk.rhs
    chk = verify_lower_mapping(ConeMatrix.identity(3), PosPolynomial([0.2, 0.7, 1.5]))
    assert chk == (1.5, 1.5, True)


def test_mapping_suite_with_residual_spot_checks(rng):
    for k in range(40):
        A = random_matrix(rng, 5)
        q = PosPolynomial(rng.uniform(0.2, 2, int(rng.integers(1, 5))))
        rep = verify_point_mapping(A, q)
        assert rep.passed
        Q = eval_operator(q, A)
        for s in rep.rhs_set[:5]:
            assert ap_residual(Q, s, seed=k)[0] <= 1e-9 * max(1.0, s)


def test_fixed_point_lift(rng):
    checked = 0
    for _ in range(200):
        A = random_matrix(rng, 5)
        c = rng.uniform(0, 1, int(rng.integers(2, 5)))
        c[0] = 0.0
        c[int(rng.integers(1, len(c)))] = 1.0
        q = PosPolynomial(c)
        Q = eval_operator(q, A)
        for lam, x in point_spectrum(Q):
            if lam == 1.0:
                y = fixed_point_lift(A, q, x)
                assert residual(A, y, 1.0) <= 1e-9
                checked += 1
    # build a guaranteed case: normalise so that 1 is an eigenvalue of q(A)
    A = ConeMatrix([[0, 2], [3, 0]]).scaled(1 / np.sqrt(6))
    q = PosPolynomial([0, 0.5, 1])
    x = point_spectrum(eval_operator(q, A))[-1].vector
    assert residual(A, fixed_point_lift(A, q, x), 1.0) <= 1e-9
    with pytest.raises(InputError):
        fixed_point_lift(A, PosPolynomial([1, 1]), x)
    with pytest.raises(InputError):
        fixed_point_lift(A, PosPolynomial([0, 2]), x)

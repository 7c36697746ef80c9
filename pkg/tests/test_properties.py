"""Property-based checks of the lattice, norm and spectral identities."""

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tropispec.core import (
    ConeMatrix,
    Semiring,
    hadamard_power,
    hadamard_product,
    lemma_good_holds,
    mat_apply,
    mat_mul,
    mat_power,
    min_modulus,
    op_norm,
)
from tropispec.maxpoly import PosPolynomial, eval_operator, eval_scalar
from tropispec.spectral import (
    bonsall_radius,
    local_radius,
    min_modulus_root_sequence,
    norm_root_sequence,
    point_spectrum,
    residual,
)

entry = st.one_of(st.just(0.0), st.floats(1e-2, 1e2))


@st.composite
def matrices(draw, n=None, semiring=Semiring.MAX_TIMES):
    n = n or draw(st.integers(1, 5))
    return ConeMatrix(draw(arrays(float, (n, n), elements=entry)), semiring)


@st.composite
def matrix_and_vectors(draw, k=2):
    A = draw(matrices())
    vs = [draw(arrays(float, A.n, elements=st.floats(0, 10))) for _ in range(k)]
    return A, vs


@given(matrix_and_vectors())
def test_apply_preserves_joins_and_scalars(data):
    A, (x, y) = data
    assert np.allclose(mat_apply(A, np.maximum(x, y)), np.maximum(mat_apply(A, x), mat_apply(A, y)))
    assert np.allclose(mat_apply(A, 2.5 * x), 2.5 * mat_apply(A, x))


@given(matrix_and_vectors())
def test_apply_is_monotone_and_bounded(data):
    A, (x, y) = data
    lo = np.minimum(x, y)
    assert np.all(mat_apply(A, lo) <= mat_apply(A, x) + 1e-12)
    norm = np.max(mat_apply(A, x)) if A.n else 0.0
    assert norm <= op_norm(A) * x.max() * (1 + 1e-12)
    assert norm >= min_modulus(A) * x.max() * (1 - 1e-12)


@given(matrix_and_vectors(), st.floats(0, 50))
def test_residual_is_lipschitz_in_s(data, s):
    A, (x, _) = data
    assume(x.max() > 0)
    t = s + 1.0
    assert abs(residual(A, x, s) - residual(A, x, t)) <= 1.0 + 1e-9


@given(matrices(), st.integers(1, 40))
def test_scaled_power_matches_repeated_product(A, k):
    P = mat_power(A, k)
    Q = A
    for _ in range(k - 1):
        Q = mat_mul(Q, A)
    if Q.entries.max() == 0:
        assert P.is_zero
    else:
        assert np.allclose(P.matrix().entries, Q.entries, rtol=1e-9, atol=1e-300)


@given(matrices())
def test_radius_bounds(A):
    r, cert = bonsall_radius(A)
    seq = norm_root_sequence(A, 8)
    low = min_modulus_root_sequence(A, 8)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(seq, seq[1:]))
    assert all(b >= a * (1 - 1e-12) for a, b in zip(low, low[1:]))
    assert r <= seq[-1] * (1 + 1e-12)
    assert low[-1] <= r * (1 + 1e-12)
    if cert is not None:
        assert np.isclose(cert.geometric_mean, r, rtol=1e-12)


@given(matrices(), st.floats(0.1, 10))
def test_radius_is_homogeneous(A, c):
    assert np.isclose(bonsall_radius(A.scaled(c))[0], c * bonsall_radius(A)[0], rtol=1e-9)


@given(matrices(), st.floats(0.2, 3))
def test_hadamard_power_radius(A, gamma):
    r = bonsall_radius(A)[0]
    assert np.isclose(bonsall_radius(hadamard_power(A, gamma))[0], r**gamma, rtol=1e-9)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(n), matrices(n))))
def test_hadamard_product_radius_submultiplicative(pair):
    A, B = pair
    r = bonsall_radius(hadamard_product(A, B))[0]
    assert r <= bonsall_radius(A)[0] * bonsall_radius(B)[0] * (1 + 1e-9)


@given(matrices())
def test_point_spectrum_eigenpairs(A):
    spec = point_spectrum(A)
    r = bonsall_radius(A)[0]
    assert spec and np.isclose(spec[-1].value, r, rtol=1e-12)
    for lam, x in spec:
        assert residual(A, x, lam) <= 1e-9 * max(1.0, lam)
        assert local_radius(A, x, 10) <= r * (1 + 1e-9)


@given(matrices(), arrays(float, st.integers(1, 4), elements=st.floats(0, 3)))
def test_maxpoly_radius_mapping(A, c):
    q = PosPolynomial(c)
    r = bonsall_radius(A)[0]
    lhs = bonsall_radius(eval_operator(q, A))[0]
    assert np.isclose(lhs, eval_scalar(q, r), rtol=1e-9, atol=1e-300)


vector_pairs = st.integers(1, 6).flatmap(
    lambda n: st.tuples(*[arrays(float, n, elements=st.floats(0, 10))] * 2)
)


@given(vector_pairs, st.floats(1.01, 10))
def test_join_rigidity(pair, s):
    x, y = pair
    assert lemma_good_holds(x, y, s)
    assert lemma_good_holds(x, s * x, s)

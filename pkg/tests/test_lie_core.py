import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from lie_core import (
    Ad,
    DualObservable,
    LieAlgebra,
    abelian,
    ad,
    adjoint_action,
    bracket,
    coadjoint,
    dump_algebra,
    jacobi_defect,
    lie_poisson_bracket,
    load_algebra,
    su2,
)
from utils import ConfigError, DomainError

PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

coords3 = arrays(np.float64, 3, elements=st.floats(-3, 3, allow_nan=False))


def _defining(X):
    return sum(c * (-0.5j) * s for c, s in zip(X.coords, PAULI))


def test_su2_bracket_matches_matrix_commutator():
    g = su2()
    X1, X2, X3 = (g.basis(k) for k in range(3))
    assert_allclose(bracket(X1, X2).coords, X3.coords)
    A, B = _defining(X1), _defining(X2)
    assert_allclose(A @ B - B @ A, _defining(X3), atol=1e-15)


@given(coords3, coords3)
def test_bracket_against_defining_representation(x, y):
    g = su2()
    X, Y = g.element(x), g.element(y)
    A, B = _defining(X), _defining(Y)
    assert_allclose(_defining(bracket(X, Y)), A @ B - B @ A, atol=1e-12)


@given(coords3)
def test_bracket_with_itself_vanishes(x):
    X = su2().element(x)
    assert_allclose(bracket(X, X).coords, 0.0, atol=1e-14)


def test_abelian_bracket_is_zero(rng):
    g = abelian(4)
    X, Y = g.element(rng.standard_normal(4)), g.element(rng.standard_normal(4))
    assert_allclose(bracket(X, Y).coords, 0.0)


def test_bracket_rejects_mismatched_algebras():
    with pytest.raises(DomainError):
        bracket(su2().basis(0), abelian(3).basis(0))


def test_ad_of_zero_and_x3():
    g = su2()
    assert_allclose(ad(g.zero()), np.zeros((3, 3)))
    M = ad(g.basis(2))
    # characteristic polynomial lambda (lambda^2 + 1)
    assert_allclose(np.poly(M), [1.0, 0.0, 1.0, 0.0], atol=1e-14)


@given(coords3)
def test_ad_is_traceless_on_su2(x):
    assert abs(np.trace(ad(su2().element(x)))) < 1e-12


@given(coords3, coords3)
def test_ad_matrix_matches_bracket(x, y):
    g = su2()
    X, Y = g.element(x), g.element(y)
    assert_allclose(ad(X) @ Y.coords, bracket(X, Y).coords, atol=1e-12)


def test_Ad_at_zero_is_identity():
    assert_allclose(Ad(su2().zero()), np.eye(3))


def test_Ad_quarter_turn_about_x3():
    g = su2()
    image = adjoint_action((np.pi / 2) * g.basis(2), g.basis(0))
    assert_allclose(image.coords, [0.0, 1.0, 0.0], atol=1e-14)


@given(coords3, coords3, coords3)
def test_Ad_is_an_automorphism(p, x, y):
    g = su2()
    G, X, Y = g.element(p), g.element(x), g.element(y)
    lhs = Ad(G) @ bracket(X, Y).coords
    rhs = bracket(adjoint_action(G, X), adjoint_action(G, Y)).coords
    assert_allclose(lhs, rhs, atol=1e-10 * (1 + np.abs(x).max() * np.abs(y).max()))


def test_coadjoint_at_zero_is_identity(rng):
    g = su2()
    alpha = g.dual(rng.standard_normal(3))
    assert_allclose(coadjoint(g.zero(), alpha).coords, alpha.coords)


@given(coords3, coords3, coords3)
def test_coadjoint_preserves_pairing(p, a, x):
    g = su2()
    G, alpha, X = g.element(p), g.dual(a), g.element(x)
    assert abs(coadjoint(G, alpha).pair(adjoint_action(G, X)) - alpha.pair(X)) < 1e-10 * (1 + np.abs(a).max() * np.abs(x).max())


@given(coords3, coords3)
def test_coadjoint_preserves_norm_on_su2(p, a):
    g = su2()
    alpha = g.dual(a)
    assert abs(coadjoint(g.element(p), alpha).norm() - alpha.norm()) < 1e-10 * (1 + alpha.norm())


@given(coords3, st.floats(-2, 2), st.floats(-2, 2))
def test_coadjoint_is_a_left_action_along_a_line(a, s, t):
    g = su2()
    X = g.element([0.3, -1.1, 0.7])
    alpha = g.dual(a)
    twice = coadjoint(s * X, coadjoint(t * X, alpha))
    once = coadjoint((s + t) * X, alpha)
    assert_allclose(twice.coords, once.coords, atol=1e-10 * (1 + alpha.norm()))


def test_structure_constants_are_validated():
    c = np.zeros((2, 2, 2))
    c[0, 1, 0] = 1.0
    with pytest.raises(DomainError, match='antisymmetric'):
        LieAlgebra(c)

    # [X1,X2] = X3, [X2,X3] = X2 leaves a cyclic sum of X3
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    c[1, 2, 1], c[2, 1, 1] = 1.0, -1.0
    assert jacobi_defect(c) > 1e-3
    with pytest.raises(DomainError, match='Jacobi'):
        LieAlgebra(c)


def test_coordinate_length_is_checked():
    with pytest.raises(DomainError):
        su2().element([1.0, 2.0])


def test_lie_poisson_bracket_of_constant_is_zero(rng):
    g = su2()
    alpha = g.dual(rng.standard_normal(3))
    f = DualObservable.constant(g, 2.5)
    h = DualObservable.linear(g.element(rng.standard_normal(3)))
    assert lie_poisson_bracket(f, h, alpha) == 0.0


@given(coords3, coords3, coords3)
def test_lie_poisson_bracket_of_linear_functions(x, y, a):
    g = su2()
    X, Y, alpha = g.element(x), g.element(y), g.dual(a)
    value = lie_poisson_bracket(DualObservable.linear(X), DualObservable.linear(Y), alpha)
    assert abs(value - alpha.pair(bracket(X, Y))) < 1e-10 * (1 + np.abs(a).max())


@settings(deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-2, 2)), coords3, coords3)
def test_lie_poisson_bracket_is_antisymmetric(Q, b, a):
    g = su2()
    alpha = g.dual(a)
    f1 = DualObservable.quadratic(g, Q, b)
    f2 = DualObservable.linear(g.element(b))
    assert abs(lie_poisson_bracket(f1, f2, alpha) + lie_poisson_bracket(f2, f1, alpha)) < 1e-10 * (1 + alpha.norm() ** 3)


def test_finite_difference_gradient_of_quadratic(rng):
    g = su2()
    Q = rng.standard_normal((3, 3))
    f = DualObservable.quadratic(g, Q + Q.T, rng.standard_normal(3))
    alpha = g.dual(rng.standard_normal(3))
    assert not f.without_gradient().has_exact_gradient
    assert_allclose(f.without_gradient().differential(alpha).coords, f.differential(alpha).coords, atol=1e-7)


def test_algebra_json_roundtrip_revalidates(tmp_path):
    path = tmp_path / 'su2.json'
    dump_algebra(su2(), path)
    loaded = load_algebra(path)
    assert loaded.same_as(su2())

    path.write_text('{"dim": 2, "c": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}')
    with pytest.raises(DomainError):
        load_algebra(path)
    path.write_text('{"dim": 3}')
    with pytest.raises(ConfigError):
        load_algebra(path)

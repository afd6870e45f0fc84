import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from hilbert_symplectic import (
    HilbertSpace,
    Observable,
    ObservableKind,
    StateVector,
    derivative_pairing_defect,
    differential,
    grad,
    inner,
    is_locally_hamiltonian,
    omega,
    omega_flat,
    omega_matrix,
    omega_sharp,
    poisson,
    poisson_observable,
    real_matrix,
    real_pairing,
    slot_convention_defect,
)
from utils import ConfigError, DomainError

SPACE = HilbertSpace(3)

components = arrays(np.float64, 6, elements=st.floats(-5, 5, allow_nan=False))


def state(values, space=SPACE):
    return space.from_real(values)


def random_skew_hermitian(rng, n):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return M - M.conj().T


def random_state(rng, space=SPACE):
    return StateVector(space, rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim))


@given(components)
def test_omega_is_alternating(v):
    x = state(v)
    assert abs(omega(x, x)) < 1e-12 * (1 + x.norm() ** 2)


@given(components)
def test_omega_of_ix_and_x_is_squared_norm(v):
    x = state(v)
    assert omega(1j * x, x) == pytest.approx(x.norm() ** 2, rel=1e-12, abs=1e-12)


def test_omega_on_one_and_i():
    space = HilbertSpace(1)
    one, i = space.vector([1.0]), space.vector([1j])
    assert inner(one, i) == -1j
    assert omega(one, i) == -1.0
    assert slot_convention_defect(one, i) == 0.0


@given(components, components)
def test_slot_convention(v, w):
    assert slot_convention_defect(state(v), state(w)) < 1e-12 * (1 + np.abs(v).max() * np.abs(w).max())


def test_omega_matrix_agrees_with_omega(rng):
    x, y = random_state(rng), random_state(rng)
    W = omega_matrix(SPACE.dim)
    assert x.to_real() @ W @ y.to_real() == pytest.approx(omega(x, y), abs=1e-12)
    A = random_skew_hermitian(rng, SPACE.dim)
    assert_allclose(real_matrix(A) @ x.to_real(), StateVector(SPACE, A @ x.components).to_real(), atol=1e-12)


def test_omega_rejects_mismatched_spaces():
    with pytest.raises(DomainError):
        omega(HilbertSpace(2).zero(), HilbertSpace(3).zero())


def test_flat_of_zero_and_sharp_of_zero():
    assert_allclose(omega_flat(SPACE.zero()).coeffs, 0.0)
    assert_allclose(omega_sharp(omega_flat(SPACE.zero())).components, 0.0)


@given(components, components, st.floats(-3, 3), st.floats(-3, 3))
def test_flat_is_real_linear(v, w, a, b):
    x, y = state(v), state(w)
    assert_allclose(omega_flat(a * x + b * y).coeffs, a * omega_flat(x).coeffs + b * omega_flat(y).coeffs, atol=1e-11)


@given(components)
def test_sharp_inverts_flat(v):
    x = state(v)
    assert_allclose(omega_sharp(omega_flat(x)).components, x.components, atol=1e-12)


def test_flat_evaluates_omega(rng):
    x, y = random_state(rng), random_state(rng)
    assert omega_flat(x)(y) == pytest.approx(omega(x, y), abs=1e-12)


def test_sharp_of_real_pairing_is_i_times_w(rng):
    w = random_state(rng)
    lifted = omega_sharp(real_pairing(w))
    assert_allclose(lifted.components, 1j * w.components, atol=1e-12)
    for y in SPACE.real_basis():
        assert omega(lifted, y) == pytest.approx(inner(w, y).real, abs=1e-12)


def test_grad_of_quadratic_is_the_operator(rng):
    A = random_skew_hermitian(rng, SPACE.dim)
    f = Observable.quadratic(SPACE, A)
    x = random_state(rng)
    assert f.kind is ObservableKind.QUADRATIC
    assert_allclose(grad(f, x).components, A @ x.components)
    assert_allclose(grad(f.without_gradient(), x).components, A @ x.components, atol=1e-6 * (1 + x.norm()))


def test_grad_of_constant_is_zero(rng):
    f = Observable.constant(SPACE, 3.0)
    assert_allclose(grad(f, random_state(rng)).components, 0.0)
    assert_allclose(grad(f.without_gradient(), random_state(rng)).components, 0.0, atol=1e-9)


def test_gradient_reproduces_finite_difference_differential(rng):
    for _ in range(50):
        f = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
        x, y = random_state(rng), random_state(rng)
        fd = differential(f, x)(y)
        exact = omega(grad(f, x), y)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


def test_quadratic_rejects_non_hamiltonian_operator():
    with pytest.raises(DomainError):
        Observable.quadratic(SPACE, np.eye(SPACE.dim))
    with pytest.raises(DomainError):
        Observable.quadratic(SPACE, np.eye(2))


def test_norm_power_gradient(rng):
    f = Observable.norm_power(SPACE, 2)
    x = random_state(rng)
    assert f(x) == pytest.approx(x.norm() ** 4)
    assert_allclose(grad(f, x).components, grad(f.without_gradient(), x).components,
                    atol=1e-6 * (1 + x.norm() ** 3))


def test_poisson_bracket_with_itself_vanishes(rng):
    f = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
    x = random_state(rng)
    assert abs(poisson(f, f, x)) < 1e-10 * (1 + x.norm() ** 2)


def test_poisson_is_antisymmetric(rng):
    for _ in range(20):
        f = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
        g = Observable.norm_power(SPACE, 2)
        x = random_state(rng)
        assert abs(poisson(f, g, x) + poisson(g, f, x)) < 1e-10 * (1 + x.norm() ** 5)


def test_poisson_equals_derivative_along_other_gradient(rng):
    f = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
    g = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
    x = random_state(rng)
    assert poisson(f, g, x) == pytest.approx(differential(f, x)(grad(g, x)), rel=1e-6, abs=1e-6)


def test_poisson_of_quadratics_is_quadratic_with_commutator(rng):
    A, B = random_skew_hermitian(rng, SPACE.dim), random_skew_hermitian(rng, SPACE.dim)
    f, g = Observable.quadratic(SPACE, A), Observable.quadratic(SPACE, B)
    bracket = poisson_observable(f, g)
    assert bracket.kind is ObservableKind.QUADRATIC
    assert_allclose(bracket.operator, A @ B - B @ A)
    for _ in range(20):
        x = random_state(rng)
        assert bracket(x) == pytest.approx(poisson(f, g, x), abs=1e-10 * (1 + x.norm() ** 2))


def test_poisson_of_general_observables(rng):
    f = Observable.norm_power(SPACE, 1)
    g = Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim))
    bracket = poisson_observable(f, g)
    assert bracket.kind is ObservableKind.GENERAL
    x = random_state(rng)
    # |x|^2 is invariant under every unitary flow
    assert abs(bracket(x)) < 1e-10 * (1 + x.norm() ** 2)


def test_jacobi_identity_for_quadratics(rng):
    for _ in range(20):
        f, g, h = (Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim)) for _ in range(3))
        x = random_state(rng)
        total = (poisson(f, poisson_observable(g, h), x)
                 + poisson(g, poisson_observable(h, f), x)
                 + poisson(h, poisson_observable(f, g), x))
        assert abs(total) < 1e-8 * (1 + x.norm() ** 2)


def test_locally_hamiltonian_examples(rng):
    assert is_locally_hamiltonian(random_skew_hermitian(rng, 4))
    assert not is_locally_hamiltonian(np.eye(4))
    assert is_locally_hamiltonian(1j * np.eye(4))
    with pytest.raises(DomainError):
        is_locally_hamiltonian(np.zeros((2, 3)))


@pytest.mark.parametrize('make', [
    lambda rng: Observable.quadratic(SPACE, random_skew_hermitian(rng, SPACE.dim)),
    lambda rng: Observable.norm_power(SPACE, 2),
])
def test_second_derivative_is_omega_representable(make, rng):
    f = make(rng)
    for _ in range(10):
        x, y1, y2 = random_state(rng), random_state(rng), random_state(rng)
        assert derivative_pairing_defect(f, x, y1, y2) < 1e-4 * (1 + x.norm() ** 4)


def test_state_vector_validation_and_json():
    with pytest.raises(DomainError):
        StateVector(SPACE, [1.0, 2.0])
    with pytest.raises(DomainError):
        HilbertSpace(0)
    x = StateVector.from_dict({'re': [1.0, 0.0], 'im': [0.0, -2.0]})
    assert x.space == HilbertSpace(2)
    assert_allclose(x.components, [1.0, -2.0j])
    assert x.to_dict() == {'re': [1.0, 0.0], 'im': [0.0, -2.0]}
    with pytest.raises(ConfigError):
        StateVector.from_dict({'re': [1.0], 'im': [0.0, 1.0]})


def test_state_vector_is_read_only(rng):
    x = random_state(rng)
    with pytest.raises(ValueError):
        x.components[0] = 0.0

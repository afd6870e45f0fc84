"""
Complex representation space H with the symplectic form omega = Im<.,.>.

The inner product is linear in the first slot, which is the convention under
which Re<x,y> = omega(ix, y). Real coordinates interleave (Re, Im) per complex
coordinate; covectors are stored as coefficient vectors in those coordinates.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from performance_config import FD_STEP, TOLERANCE_CONFIG
from utils import ConfigError, DomainError

logger = logging.getLogger(__name__)

# real 2x2 block of multiplication by i
_I_BLOCK = np.array([[0.0, -1.0], [1.0, 0.0]])


def omega_matrix(dim):
    """Real 2n x 2n matrix W with omega(x, y) = to_real(x) @ W @ to_real(y)"""
    return np.kron(np.eye(dim), _I_BLOCK)


def real_matrix(A):
    """Real 2n x 2n matrix of a complex-linear operator in interleaved coordinates"""
    A = np.asarray(A, dtype=complex)
    return np.kron(A.real, np.eye(2)) + np.kron(A.imag, _I_BLOCK)


@dataclass(frozen=True)
class HilbertSpace:
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"Hilbert space dimension must be a positive integer, got {self.dim}")
        W = omega_matrix(self.dim)
        # omega must be nondegenerate: the flat map has full real rank
        rank = np.linalg.matrix_rank(W)
        if rank != 2 * self.dim:
            raise DomainError(f"omega is degenerate on C^{self.dim} (rank {rank})")
        # Re<x,y> = omega(ix, y): the real inner product is the identity in real coordinates
        slot_defect = np.max(np.abs(real_matrix(1j * np.eye(self.dim)).T @ W - np.eye(2 * self.dim)))
        if slot_defect > TOLERANCE_CONFIG['omega_identity']:
            raise DomainError(f"Inner product slot convention broken (defect {slot_defect:.3e})")
        logger.debug("Built Hilbert space C^%d", self.dim)

    @property
    def real_dim(self):
        return 2 * self.dim

    def vector(self, components):
        return StateVector(self, components)

    def zero(self):
        return StateVector(self, np.zeros(self.dim, dtype=complex))

    def basis(self, index):
        components = np.zeros(self.dim, dtype=complex)
        components[index] = 1.0
        return StateVector(self, components)

    def real_basis(self):
        """The 2n vectors e_k and i*e_k, in interleaved order"""
        return [self.from_real(row) for row in np.eye(self.real_dim)]

    def from_real(self, coords):
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.real_dim,):
            raise DomainError(f"Expected {self.real_dim} real coordinates, got shape {coords.shape}")
        return StateVector(self, coords[0::2] + 1j * coords[1::2])


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    components: np.ndarray

    def __post_init__(self):
        values = np.array(self.components, dtype=complex).reshape(-1)
        if values.shape != (self.space.dim,):
            raise DomainError(f"State vector needs {self.space.dim} components, got {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, 'components', values)

    def __add__(self, other):
        require_same_space(self.space, other.space)
        return StateVector(self.space, self.components + other.components)

    def __sub__(self, other):
        require_same_space(self.space, other.space)
        return StateVector(self.space, self.components - other.components)

    def __neg__(self):
        return StateVector(self.space, -self.components)

    def __mul__(self, scalar):
        return StateVector(self.space, complex(scalar) * self.components)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.components))

    def to_real(self):
        coords = np.empty(self.space.real_dim)
        coords[0::2] = self.components.real
        coords[1::2] = self.components.imag
        return coords

    def to_dict(self):
        return {'re': self.components.real.tolist(), 'im': self.components.imag.tolist()}

    @classmethod
    def from_dict(cls, data, space=None):
        try:
            re = np.array(data['re'], dtype=float)
            im = np.array(data.get('im', np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid state vector JSON: {e}")
        if re.shape != im.shape or re.ndim != 1:
            raise ConfigError("State vector JSON needs 're' and 'im' lists of equal length")
        space = space or HilbertSpace(re.size)
        return cls(space, re + 1j * im)


def require_same_space(a, b):
    if a != b:
        raise DomainError(f"Vectors live in different spaces (C^{a.dim} vs C^{b.dim})")


def inner(x, y):
    """Hermitian inner product, linear in x and conjugate-linear in y"""
    require_same_space(x.space, y.space)
    return complex(np.vdot(y.components, x.components))


def omega(x, y):
    """omega(x, y) = Im<x, y>"""
    return inner(x, y).imag


@dataclass(frozen=True, eq=False)
class RealCovector:
    """Real-linear functional on H; l(y) = coeffs @ to_real(y)"""

    space: HilbertSpace
    coeffs: np.ndarray

    def __post_init__(self):
        values = np.array(self.coeffs, dtype=float).reshape(-1)
        if values.shape != (self.space.real_dim,):
            raise DomainError(f"Covector needs {self.space.real_dim} coefficients, got {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, 'coeffs', values)

    def __call__(self, y):
        require_same_space(self.space, y.space)
        return float(self.coeffs @ y.to_real())


def omega_flat(x):
    """The covector y -> omega(x, y)"""
    return RealCovector(x.space, x.to_real() @ omega_matrix(x.space.dim))


def omega_sharp(covector):
    """The unique x with omega(x, .) equal to the given covector"""
    W = omega_matrix(covector.space.dim)
    return covector.space.from_real(np.linalg.solve(W.T, covector.coeffs))


def real_pairing(w):
    """The covector y -> Re<w, y>; its omega-representative is i*w"""
    return RealCovector(w.space, w.to_real())


class ObservableKind(enum.Enum):
    QUADRATIC = 'quadratic'
    GENERAL = 'general'


@dataclass(frozen=True, eq=False)
class Observable:
    """Smooth real function on H together with its omega-gradient, if known.

    Quadratic observables are value(x) = 1/2 omega(Ax, x) for a stored operator
    A with omega(Ax, y) = omega(Ay, x); their gradient is x -> Ax.
    """

    space: HilbertSpace
    value: Callable[[StateVector], float]
    gradient: Optional[Callable[[StateVector], StateVector]] = None
    kind: ObservableKind = ObservableKind.GENERAL
    operator: Optional[np.ndarray] = None
    label: str = ''

    def __call__(self, x):
        return float(self.value(x))

    @classmethod
    def quadratic(cls, space, A, label='quadratic'):
        A = np.array(A, dtype=complex)
        if A.shape != (space.dim, space.dim):
            raise DomainError(f"Operator has shape {A.shape}, expected ({space.dim}, {space.dim})")
        defect = omega_symmetry_defect(A)
        tol = TOLERANCE_CONFIG['locally_hamiltonian'] * max(1.0, float(np.max(np.abs(A), initial=0.0)))
        if defect > tol:
            raise DomainError(f"omega(Ax, y) = omega(Ay, x) fails for this operator (defect {defect:.3e})")
        A.setflags(write=False)

        def value(x):
            return 0.5 * omega(StateVector(space, A @ x.components), x)

        def gradient(x):
            return StateVector(space, A @ x.components)

        return cls(space, value, gradient, ObservableKind.QUADRATIC, A, label)

    @classmethod
    def constant(cls, space, c):
        return cls(space, lambda x: float(c), lambda x: space.zero(), label=f"constant {c}")

    @classmethod
    def norm_power(cls, space, p):
        """|x|^(2p), a polynomial observable with gradient 2p |x|^(2p-2) i x"""
        p = int(p)

        def value(x):
            return x.norm() ** (2 * p)

        def gradient(x):
            return StateVector(space, 2 * p * x.norm() ** (2 * p - 2) * 1j * x.components)

        return cls(space, value, gradient, label=f"|x|^{2 * p}")

    def without_gradient(self):
        return Observable(self.space, self.value, None, ObservableKind.GENERAL, None, self.label)


def omega_symmetry_defect(A):
    """Max over real basis pairs of |omega(Ay1, y2) - omega(Ay2, y1)|"""
    S = real_matrix(A).T @ omega_matrix(np.shape(A)[0])
    return float(np.max(np.abs(S - S.T), initial=0.0))


def differential(f, x):
    """df(x) as a covector by central differences along the real basis"""
    space = x.space
    h = FD_STEP * (1.0 + x.norm())
    base = x.to_real()
    coeffs = np.empty(space.real_dim)
    for k in range(space.real_dim):
        step = np.zeros(space.real_dim)
        step[k] = h
        coeffs[k] = (f.value(space.from_real(base + step)) - f.value(space.from_real(base - step))) / (2.0 * h)
    return RealCovector(space, coeffs)


def directional_derivative(f, x, y):
    """df(x)y by a central difference along y"""
    h = FD_STEP * (1.0 + x.norm())
    return (f.value(x + h * y) - f.value(x - h * y)) / (2.0 * h)


def grad(f, x):
    """omega-gradient: df(x)y = omega(grad f(x), y)"""
    require_same_space(f.space, x.space)
    if f.gradient is not None:
        return f.gradient(x)
    return omega_sharp(differential(f, x))


def poisson(f, g, x):
    """Poisson bracket {f, g}(x) = omega(grad f(x), grad g(x)) = df(x)(grad g(x)).

    This ordering makes {f_A, f_B} = f_[A,B] for quadratic observables, so the
    lift of a unitary representation is a homomorphism.
    """
    return omega(grad(f, x), grad(g, x))


def poisson_observable(f, g):
    """{f, g} as an Observable; quadratic inputs give a quadratic result"""
    require_same_space(f.space, g.space)
    if f.kind is ObservableKind.QUADRATIC and g.kind is ObservableKind.QUADRATIC:
        commutator = f.operator @ g.operator - g.operator @ f.operator
        return Observable.quadratic(f.space, commutator, label=f"{{{f.label}, {g.label}}}")
    return Observable(f.space, lambda x: poisson(f, g, x), label=f"{{{f.label}, {g.label}}}")


def is_locally_hamiltonian(A, tol=None):
    """True iff omega(Ay1, y2) = -omega(y1, Ay2) on all real basis pairs"""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"Operator must be square, got shape {A.shape}")
    tol = TOLERANCE_CONFIG['locally_hamiltonian'] if tol is None else tol
    M = real_matrix(A)
    W = omega_matrix(A.shape[0])
    defect = float(np.max(np.abs(M.T @ W + W @ M), initial=0.0))
    return defect <= tol * max(1.0, float(np.max(np.abs(A), initial=0.0)))


def slot_convention_defect(x, y):
    """|Re<x,y> - omega(ix, y)|"""
    return abs(inner(x, y).real - omega(1j * x, y))


def derivative_pairing_defect(f, x, y1, y2):
    """Compare d2f(x)(y1, y2) with omega(d(grad f)(x) y2, y1), both by central differences.

    This is the identity that puts a function with a smooth gradient into the
    class whose iterated derivatives are all omega-representable.
    """
    h = FD_STEP * (1.0 + x.norm())
    second = (directional_derivative(f, x + h * y2, y1) - directional_derivative(f, x - h * y2, y1)) / (2.0 * h)
    d_grad = (grad(f, x + h * y2) - grad(f, x - h * y2)) * (1.0 / (2.0 * h))
    return abs(second - omega(d_grad, y1))

"""
Finite-dimensional real Lie algebras for momentlab.

An algebra is given by structure constants c[i][j][k] with
[X_i, X_j] = sum_k c[i][j][k] X_k. Elements, dual vectors and the adjoint and
coadjoint actions are plain numpy computations on coordinates; group elements
are never stored, only their exponential parameters.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from performance_config import FD_STEP, TOLERANCE_CONFIG
from utils import ConfigError, DomainError

logger = logging.getLogger(__name__)


def jacobi_defect(c):
    """Largest entry of the cyclic Jacobi sum built from structure constants"""
    term = np.einsum('ijm,mkl->ijkl', c, c)
    total = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(total), initial=0.0))


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    structure_constants: np.ndarray
    basis_labels: tuple = ()

    def __post_init__(self):
        c = np.array(self.structure_constants, dtype=float)
        if c.ndim != 3 or c.shape[0] < 1 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise DomainError(f"Structure constants must have shape (n, n, n), got {c.shape}")
        dim = c.shape[0]
        labels = tuple(str(label) for label in self.basis_labels) or tuple(f"X{i + 1}" for i in range(dim))
        if len(labels) != dim:
            raise DomainError(f"Expected {dim} basis labels, got {len(labels)}")

        scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
        tol = TOLERANCE_CONFIG['structure']
        antisymmetry = float(np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0))
        if antisymmetry > tol * scale:
            raise DomainError(f"Structure constants are not antisymmetric (defect {antisymmetry:.3e})")
        jacobi = jacobi_defect(c)
        if jacobi > tol * scale ** 2:
            raise DomainError(f"Structure constants violate the Jacobi identity (defect {jacobi:.3e})")

        c.setflags(write=False)
        object.__setattr__(self, 'structure_constants', c)
        object.__setattr__(self, 'basis_labels', labels)
        logger.debug("Built Lie algebra of dimension %d (%s)", dim, ", ".join(labels))

    @property
    def dim(self):
        return self.structure_constants.shape[0]

    def same_as(self, other):
        return self is other or (
            isinstance(other, LieAlgebra)
            and self.basis_labels == other.basis_labels
            and np.array_equal(self.structure_constants, other.structure_constants)
        )

    def element(self, coords):
        return AlgebraElement(self, coords)

    def dual(self, coords):
        return DualVector(self, coords)

    def basis(self, index):
        coords = np.zeros(self.dim)
        coords[index] = 1.0
        return AlgebraElement(self, coords)

    def zero(self):
        return AlgebraElement(self, np.zeros(self.dim))

    def to_dict(self):
        return {
            'dim': self.dim,
            'labels': list(self.basis_labels),
            'c': self.structure_constants.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            dim = int(data['dim'])
            labels = data.get('labels') or ()
            c = np.array(data['c'], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid Lie algebra JSON: {e}")
        if c.shape != (dim, dim, dim):
            raise ConfigError(f"Lie algebra JSON declares dim {dim} but 'c' has shape {c.shape}")
        return cls(c, tuple(labels))


def _coordinate_vector(algebra, coords, kind):
    values = np.array(coords, dtype=float).reshape(-1)
    if values.shape != (algebra.dim,):
        raise DomainError(f"{kind} needs {algebra.dim} coordinates, got {values.size}")
    values.setflags(write=False)
    return values


def require_same_algebra(a, b):
    """Raise DomainError unless both algebras agree"""
    if not a.same_as(b):
        raise DomainError("Operands belong to different Lie algebras")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: LieAlgebra
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'coords', _coordinate_vector(self.algebra, self.coords, 'AlgebraElement'))

    def __add__(self, other):
        require_same_algebra(self.algebra, other.algebra)
        return AlgebraElement(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        require_same_algebra(self.algebra, other.algebra)
        return AlgebraElement(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coords)

    def __mul__(self, scalar):
        return AlgebraElement(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True, eq=False)
class DualVector:
    """Element of the dual of the algebra; coords[i] is the value on X_i"""

    algebra: LieAlgebra
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'coords', _coordinate_vector(self.algebra, self.coords, 'DualVector'))

    def pair(self, X):
        require_same_algebra(self.algebra, X.algebra)
        return float(self.coords @ X.coords)

    def __add__(self, other):
        require_same_algebra(self.algebra, other.algebra)
        return DualVector(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        require_same_algebra(self.algebra, other.algebra)
        return DualVector(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return DualVector(self.algebra, -self.coords)

    def __mul__(self, scalar):
        return DualVector(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.coords))


def bracket(X, Y):
    """Lie bracket [X, Y] from the structure constants"""
    require_same_algebra(X.algebra, Y.algebra)
    coords = np.einsum('i,j,ijk->k', X.coords, Y.coords, X.algebra.structure_constants)
    return AlgebraElement(X.algebra, coords)


def ad(X):
    """Matrix of Y -> [X, Y] in the basis"""
    return np.einsum('i,ijk->kj', X.coords, X.algebra.structure_constants)


def Ad(g_param):
    """Adjoint action of exp(g_param), i.e. the matrix exponential of ad(g_param)"""
    return expm(ad(g_param))


def adjoint_action(g_param, X):
    require_same_algebra(g_param.algebra, X.algebra)
    return AlgebraElement(X.algebra, Ad(g_param) @ X.coords)


def coadjoint(g_param, alpha):
    """Coadjoint action Ad'(g) = Ad(g^-1)' with g = exp(g_param).

    In coordinates this is the transpose of Ad(-g_param), so that
    <Ad'(g) alpha, Ad(g) X> = <alpha, X>.
    """
    require_same_algebra(g_param.algebra, alpha.algebra)
    return DualVector(alpha.algebra, Ad(-g_param).T @ alpha.coords)


@dataclass(frozen=True)
class DualObservable:
    """Smooth real function on the dual of an algebra.

    `gradient` returns df(alpha) as an AlgebraElement; when it is missing,
    `differential` falls back to central differences.
    """

    algebra: LieAlgebra
    value: Callable[[DualVector], float]
    gradient: Optional[Callable[[DualVector], AlgebraElement]] = None
    label: str = ''

    def __call__(self, alpha):
        return float(self.value(alpha))

    @property
    def has_exact_gradient(self):
        return self.gradient is not None

    def differential(self, alpha):
        require_same_algebra(self.algebra, alpha.algebra)
        if self.gradient is not None:
            return self.gradient(alpha)
        h = FD_STEP * (1.0 + alpha.norm())
        coords = np.empty(self.algebra.dim)
        for i in range(self.algebra.dim):
            step = np.zeros(self.algebra.dim)
            step[i] = h
            forward = self.value(DualVector(self.algebra, alpha.coords + step))
            backward = self.value(DualVector(self.algebra, alpha.coords - step))
            coords[i] = (forward - backward) / (2.0 * h)
        return AlgebraElement(self.algebra, coords)

    def without_gradient(self):
        return replace(self, gradient=None, label=f"{self.label} (finite differences)".strip())

    @classmethod
    def constant(cls, algebra, c):
        return cls(algebra, lambda alpha: float(c), lambda alpha: algebra.zero(), f"constant {c}")

    @classmethod
    def linear(cls, X):
        """f_X(alpha) = alpha(X), with constant gradient X"""
        return cls(X.algebra, lambda alpha: alpha.pair(X), lambda alpha: X, 'linear')

    @classmethod
    def quadratic(cls, algebra, Q, b=None):
        """f(alpha) = 1/2 alpha^T Q alpha + b . alpha, Q symmetrised"""
        Q = np.array(Q, dtype=float)
        Q = 0.5 * (Q + Q.T)
        b = np.zeros(algebra.dim) if b is None else np.array(b, dtype=float)
        if Q.shape != (algebra.dim, algebra.dim) or b.shape != (algebra.dim,):
            raise DomainError("Quadratic dual observable has mismatched shapes")

        def value(alpha):
            return 0.5 * float(alpha.coords @ Q @ alpha.coords) + float(b @ alpha.coords)

        def gradient(alpha):
            return AlgebraElement(algebra, Q @ alpha.coords + b)

        return cls(algebra, value, gradient, 'quadratic')


def lie_poisson_bracket(f1, f2, alpha):
    """Lie-Poisson bracket {f1, f2}(alpha) = alpha([df1(alpha), df2(alpha)])"""
    return alpha.pair(bracket(f1.differential(alpha), f2.differential(alpha)))


def su2():
    """su(2) with [X1,X2] = X3 cyclically; X_k acts as -(i/2) sigma_k in the defining rep"""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return LieAlgebra(c, ('X1', 'X2', 'X3'))


def abelian(n):
    """n-dimensional abelian algebra (Lie algebra of the n-torus)"""
    if int(n) < 1:
        raise DomainError(f"Abelian algebra needs dimension >= 1, got {n}")
    return LieAlgebra(np.zeros((int(n), int(n), int(n))), tuple(f"T{i + 1}" for i in range(int(n))))


def load_algebra(path):
    """Load and re-validate a Lie algebra from a JSON file"""
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Failed to read Lie algebra from {path}: {e}")
    return LieAlgebra.from_dict(data)


def dump_algebra(algebra, path):
    with open(path, 'w') as f:
        json.dump(algebra.to_dict(), f, indent=2)

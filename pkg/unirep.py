"""
Unitary representations given by skew-Hermitian generators.

generators[i] is rho'(X_i). The group acts through exponentials of
rho'(g_param); for skew-Hermitian inputs the exponential is taken through a
Hermitian eigendecomposition, which keeps the result unitary to machine
precision.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, expm

from hilbert_symplectic import HilbertSpace, StateVector, require_same_space
from lie_core import LieAlgebra, abelian, require_same_algebra, su2
from performance_config import TOLERANCE_CONFIG, get_tolerance
from reports import CheckReport
from utils import ConfigError, DomainError, validate_spin, validate_square_stack

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class UnitaryRep:
    algebra: LieAlgebra
    space: HilbertSpace
    generators: np.ndarray
    label: str = ''

    def __post_init__(self):
        matrices = [np.array(A, dtype=complex) for A in self.generators]
        if len(matrices) != self.algebra.dim:
            raise DomainError(f"Need {self.algebra.dim} generators, got {len(matrices)}")
        ok, message = validate_square_stack(matrices, self.space.dim)
        if not ok:
            raise DomainError(message)
        stack = np.array(matrices, dtype=complex).reshape(self.algebra.dim, self.space.dim, self.space.dim)
        stack.setflags(write=False)
        object.__setattr__(self, 'generators', stack)

    @property
    def dim(self):
        return self.space.dim

    def to_dict(self):
        return {
            'algebra': self.algebra.to_dict(),
            'dim': self.dim,
            'generators': [{'re': A.real.tolist(), 'im': A.imag.tolist()} for A in self.generators],
        }

    @classmethod
    def from_dict(cls, data, label=''):
        try:
            algebra = LieAlgebra.from_dict(data['algebra'])
            dim = int(data['dim'])
            generators = [np.array(g['re'], dtype=float) + 1j * np.array(g.get('im', 0.0), dtype=float)
                          for g in data['generators']]
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid representation JSON: {e}")
        return cls(algebra, HilbertSpace(dim), generators, label)


def exp_skew_hermitian(A):
    """Matrix exponential, exact-structure path for skew-Hermitian input"""
    A = np.asarray(A, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    if np.max(np.abs(A + A.conj().T), initial=0.0) <= TOLERANCE_CONFIG['skew_hermitian'] * scale:
        H = 1j * A
        H = 0.5 * (H + H.conj().T)
        eigenvalues, V = np.linalg.eigh(H)
        return (V * np.exp(-1j * eigenvalues)) @ V.conj().T
    logger.warning("Generator combination is not skew-Hermitian; using general matrix exponential")
    return expm(A)


def rho_prime(rep, X):
    """rho'(X) = sum_i X.coords[i] * generators[i]"""
    require_same_algebra(rep.algebra, X.algebra)
    return np.tensordot(X.coords, rep.generators, axes=1)


def rho(rep, g_param):
    """rho(exp(g_param)) = exp(rho'(g_param))"""
    return exp_skew_hermitian(rho_prime(rep, g_param))


def act(rep, g_param, x):
    """rho(exp(g_param)) x"""
    require_same_space(rep.space, x.space)
    return StateVector(rep.space, rho(rep, g_param) @ x.components)


def su2_spin(j):
    """Spin-j irreducible representation of su(2), basis ordered by weight m = j, j-1, ..., -j"""
    ok, message = validate_spin(j)
    if not ok:
        raise DomainError(message)
    j = round(2 * float(j)) / 2
    m = j - np.arange(int(round(2 * j)) + 1)
    size = m.size

    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
    j_plus = np.zeros((size, size))
    for a in range(1, size):
        j_plus[a - 1, a] = np.sqrt(j * (j + 1) - m[a] * (m[a] + 1))
    j_minus = j_plus.T
    j_x = 0.5 * (j_plus + j_minus)
    j_y = (j_plus - j_minus) / 2j
    j_z = np.diag(m)

    generators = [-1j * J for J in (j_x, j_y, j_z)]
    label = f"su2:spin={_format_spin(j)}"
    logger.debug("Built %s of dimension %d", label, size)
    return UnitaryRep(su2(), HilbertSpace(size), generators, label)


def _format_spin(j):
    return str(int(j)) if float(j).is_integer() else f"{j:g}"


def trivial(algebra, dim=1):
    return UnitaryRep(algebra, HilbertSpace(dim), [np.zeros((dim, dim))] * algebra.dim, f"trivial:dim={dim}")


def torus(weights):
    """Diagonal representation of the torus; row k of `weights` is the weight of e_k.

    rho'(T_i) = i * diag(weights[:, i]), so -i rho'(T_i) has the weights as eigenvalues.
    """
    weights = np.array(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] < 1 or weights.shape[1] < 1:
        raise DomainError(f"Torus weights must be a nonempty 2-d list, got shape {weights.shape}")
    generators = [np.diag(1j * weights[:, i]) for i in range(weights.shape[1])]
    label = f"torus:dim={weights.shape[1]},weights={json.dumps(weights.tolist())}"
    return UnitaryRep(abelian(weights.shape[1]), HilbertSpace(weights.shape[0]), generators, label)


def direct_sum(r1, r2):
    require_same_algebra(r1.algebra, r2.algebra)
    generators = [block_diag(A, B) for A, B in zip(r1.generators, r2.generators)]
    return UnitaryRep(r1.algebra, HilbertSpace(r1.dim + r2.dim), generators, f"sum({r1.label},{r2.label})")


def tensor(r1, r2):
    require_same_algebra(r1.algebra, r2.algebra)
    eye1 = np.eye(r1.dim)
    eye2 = np.eye(r2.dim)
    generators = [np.kron(A, eye2) + np.kron(eye1, B) for A, B in zip(r1.generators, r2.generators)]
    return UnitaryRep(r1.algebra, HilbertSpace(r1.dim * r2.dim), generators, f"tensor({r1.label},{r2.label})")


def skew_hermitian_defects(rep):
    return [float(np.max(np.abs(A + A.conj().T), initial=0.0)) for A in rep.generators]


def homomorphism_defects(rep):
    """{(i, j): max |rho'([X_i, X_j]) - [rho'(X_i), rho'(X_j)]|} for i < j"""
    c = rep.algebra.structure_constants
    images = np.tensordot(c, rep.generators, axes=([2], [0]))
    defects = {}
    for i in range(rep.algebra.dim):
        for j in range(i + 1, rep.algebra.dim):
            A, B = rep.generators[i], rep.generators[j]
            defects[(i, j)] = float(np.max(np.abs(images[i, j] - (A @ B - B @ A)), initial=0.0))
    return defects


def verify_rep(rep, overrides=None):
    """Check both representation invariants; failures are reported, not raised"""
    skew_tol = get_tolerance('skew_hermitian', overrides)
    hom_tol = get_tolerance('homomorphism', overrides)

    skew = skew_hermitian_defects(rep)
    worst_generator = int(np.argmax(skew))
    skew_report = CheckReport(
        'skew_hermitian', skew[worst_generator], skew_tol,
        witness={'generator': worst_generator, 'per_generator': skew},
    )

    hom = homomorphism_defects(rep)
    if hom:
        worst_pair = max(hom, key=hom.get)
        hom_defect = hom[worst_pair]
    else:
        worst_pair, hom_defect = None, 0.0
    hom_report = CheckReport(
        'homomorphism', hom_defect, hom_tol,
        witness={
            'pair': list(worst_pair) if worst_pair else None,
            'per_pair': [{'i': i, 'j': j, 'defect': d} for (i, j), d in hom.items()],
        },
    )

    for report in (skew_report, hom_report):
        if not report.passed:
            logger.warning("%s failed %s: defect %.3e > %.3e", rep.label or 'representation',
                           report.check, report.defect, report.tolerance)
    return [skew_report, hom_report]


def load_rep(path):
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Failed to read representation from {path}: {e}")
    return UnitaryRep.from_dict(data, label=str(path))


def dump_rep(rep, path):
    with open(path, 'w') as f:
        json.dump(rep.to_dict(), f, indent=2)

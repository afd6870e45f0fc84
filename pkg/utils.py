from __future__ import annotations

import numpy as np


class MomentlabError(Exception):
    """Base class for all momentlab errors"""


class DomainError(MomentlabError, ValueError):
    """Inputs that do not belong together or violate a structural invariant"""


class ConfigError(MomentlabError, ValueError):
    """Unparseable representation source, JSON document or command-line flag"""


class NumericError(MomentlabError, ArithmeticError):
    """A numerical routine failed; diagnostics describe where"""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


def validate_spin(j):
    """Validate a spin label: 2j must be a nonnegative integer"""
    try:
        twice = float(j) * 2.0
    except (TypeError, ValueError):
        return False, f"Spin must be a number, got {j!r}"
    if twice < 0:
        return False, "Spin must be nonnegative"
    if abs(twice - round(twice)) > 1e-12:
        return False, f"Spin {j} is not a half-integer"
    return True, ""


def validate_samples(n_samples):
    """Validate a sample count"""
    try:
        value = int(n_samples)
    except (TypeError, ValueError):
        return False, "Sample count must be an integer"
    if value != n_samples:
        return False, "Sample count must be an integer"
    if value < 1:
        return False, "Sample count must be at least 1"
    return True, ""


def validate_square_stack(matrices, size):
    """Validate a list of size×size matrices"""
    for index, matrix in enumerate(matrices):
        if np.ndim(matrix) != 2 or np.shape(matrix) != (size, size):
            return False, f"Matrix {index} has shape {np.shape(matrix)}, expected ({size}, {size})"
        if not np.all(np.isfinite(matrix)):
            return False, f"Matrix {index} has non-finite entries"
    return True, ""


def relative_error(approx, exact):
    """Max-norm error relative to the larger of 1 and the exact value's size"""
    approx = np.asarray(approx)
    exact = np.asarray(exact)
    scale = max(1.0, float(np.max(np.abs(exact), initial=0.0)))
    return float(np.max(np.abs(approx - exact), initial=0.0)) / scale


def singular_values_rank(singular_values, rtol):
    """Number of singular values above rtol times the largest one"""
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def numerical_rank(matrix, rtol):
    """Rank of a real matrix via SVD with a relative threshold"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0
    return singular_values_rank(np.linalg.svd(matrix, compute_uv=False), rtol)


def null_space_basis(matrix, rtol):
    """Orthonormal basis (as columns) of the null space of a real matrix"""
    matrix = np.asarray(matrix, dtype=float)
    n_cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(n_cols)
    _, s, vh = np.linalg.svd(matrix, full_matrices=True)
    rank = singular_values_rank(s, rtol)
    return vh[rank:].T.copy()


def range_basis(matrix, rtol):
    """Orthonormal basis (as columns) of the column space of a real matrix"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.zeros((matrix.shape[0], 0))
    u, s, _ = np.linalg.svd(matrix, full_matrices=False)
    rank = singular_values_rank(s, rtol)
    return u[:, :rank].copy()


def random_complex_vector(rng, n):
    """Vector of i.i.d. standard complex Gaussian components"""
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def format_float(value):
    """Format a float with 17 significant digits for round-trip fidelity"""
    return format(float(value), ".17g")

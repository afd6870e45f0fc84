"""
The lift sigma and the moment mapping of a unitary representation.

sigma(X)(x) = 1/2 omega(rho'(X)x, x) is the unique function with
d sigma(X) = omega(rho'(X)., .) and sigma(X)(0) = 0, and
mu(x)(X) = sigma(X)(x). Every property proved about them has a check here that
returns a CheckReport; random checks draw from numpy Generators so runs are
reproducible from a seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from hilbert_symplectic import (
    Observable,
    StateVector,
    differential,
    grad,
    omega,
    omega_matrix,
    omega_sharp,
    poisson,
    real_matrix,
    RealCovector,
    require_same_space,
)
from lie_core import (
    Ad,
    AlgebraElement,
    DualObservable,
    DualVector,
    bracket,
    coadjoint,
    lie_poisson_bracket,
    require_same_algebra,
)
from optimization import parallel_map, performance_timer, seeded_batches
from performance_config import (
    FD_STEP,
    FLOW_ATOL,
    FLOW_METHOD,
    FLOW_RTOL,
    SAMPLING_CONFIG,
    SVD_RTOL,
    get_tolerance,
)
from reports import CheckReport
from unirep import act, rho_prime
from utils import (
    DomainError,
    NumericError,
    null_space_basis,
    numerical_rank,
    random_complex_vector,
    range_basis,
    relative_error,
    validate_samples,
)

logger = logging.getLogger(__name__)

# mu(x) is a dual vector whose coordinates are sigma(X_i)(x)
MomentValue = DualVector


def _check_compatible(rep, x):
    require_same_space(rep.space, x.space)


def random_element(algebra, rng):
    return AlgebraElement(algebra, rng.standard_normal(algebra.dim))


def random_state(space, rng):
    return StateVector(space, random_complex_vector(rng, space.dim))


def _state_witness(x):
    return x.to_dict()


# -- sigma and mu -----------------------------------------------------------

def sigma(rep, X, x):
    """sigma(X)(x) = 1/2 omega(rho'(X)x, x)"""
    _check_compatible(rep, x)
    A = rho_prime(rep, X)
    return 0.5 * omega(StateVector(rep.space, A @ x.components), x)


def sigma_observable(rep, X):
    """sigma(X) as a quadratic observable with operator rho'(X)"""
    return Observable.quadratic(rep.space, rho_prime(rep, X), label='sigma')


def moment(rep, x):
    """mu(x), with coordinates sigma(X_i)(x)"""
    _check_compatible(rep, x)
    images = rep.generators @ x.components
    return DualVector(rep.algebra, 0.5 * (images @ x.components.conj()).imag)


def moment_batch(rep, states):
    """mu evaluated on each row of a (samples, dim) complex array"""
    images = np.einsum('dij,sj->sdi', rep.generators, states)
    return 0.5 * np.einsum('sdi,si->sd', images, states.conj()).imag


def d_moment(rep, x):
    """Real (dim g) x 2n matrix of y -> (X_i -> omega(rho'(X_i)x, y))"""
    _check_compatible(rep, x)
    W = omega_matrix(rep.dim)
    rows = [StateVector(rep.space, A @ x.components).to_real() @ W for A in rep.generators]
    return np.array(rows)


def orbit_tangent_matrix(rep, x):
    """Real 2n x (dim g) matrix whose columns are rho'(X_i)x"""
    _check_compatible(rep, x)
    columns = [StateVector(rep.space, A @ x.components).to_real() for A in rep.generators]
    return np.array(columns).T


def isotropy_algebra(rep, x):
    """Orthonormal basis (columns, algebra coordinates) of {X : rho'(X)x = 0}"""
    _check_compatible(rep, x)
    if x.norm() == 0.0:
        return np.eye(rep.algebra.dim)
    return null_space_basis(orbit_tangent_matrix(rep, x), SVD_RTOL)


# -- Checks on sigma ----------------------------------------------------------

def _analytic_sigma_differential(rep, X, x):
    """d sigma(X)(x) on the real basis: 1/2 omega(Ay, x) + 1/2 omega(Ax, y)"""
    A = rho_prime(rep, X)
    Ax = StateVector(rep.space, A @ x.components)
    coeffs = [0.5 * omega(StateVector(rep.space, A @ y.components), x) + 0.5 * omega(Ax, y)
              for y in rep.space.real_basis()]
    return RealCovector(rep.space, coeffs)


def grad_sigma_check(rep, X, samples=None, seed=None, method='exact', overrides=None):
    """Max over random x of |grad sigma(X)(x) - rho'(X)x| / (1 + |x|).

    The exact path lifts the analytic differential of sigma(X) through omega
    and also checks the observable's own gradient; the finite-difference path
    lifts a central-difference differential.
    """
    if method not in ('exact', 'finite_difference'):
        raise DomainError(f"Unknown gradient method '{method}'")
    samples = samples or SAMPLING_CONFIG['gradient_trials']
    rng = np.random.default_rng(seed)
    f = sigma_observable(rep, X)
    A = rho_prime(rep, X)

    worst, witness = 0.0, {}
    for _ in range(samples):
        x = random_state(rep.space, rng)
        expected = StateVector(rep.space, A @ x.components)
        if method == 'exact':
            candidates = [grad(f, x), omega_sharp(_analytic_sigma_differential(rep, X, x))]
        else:
            candidates = [omega_sharp(differential(f, x))]
        defect = max((c - expected).norm() for c in candidates) / (1.0 + x.norm())
        if defect >= worst:
            worst, witness = defect, {'x': _state_witness(x), 'X': X.coords.tolist()}

    name = 'grad_exact' if method == 'exact' else 'grad_fd'
    return CheckReport(f"grad_sigma_{method}", worst, get_tolerance(name, overrides), witness)


def sigma_cocycle(rep, X, Y, x):
    """{sigma(X), sigma(Y)}(x) - sigma([X, Y])(x); zero exactly when sigma is a homomorphism"""
    return poisson(sigma_observable(rep, X), sigma_observable(rep, Y), x) - sigma(rep, bracket(X, Y), x)


def sigma_homomorphism_defect(rep, X, Y, samples=None, seed=None):
    """Max over random x of |{sigma(X), sigma(Y)}(x) - sigma([X,Y])(x)| / (1 + |x|^2)"""
    require_same_algebra(X.algebra, Y.algebra)
    samples = samples or SAMPLING_CONFIG['homomorphism_trials']
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = random_state(rep.space, rng)
        worst = max(worst, abs(sigma_cocycle(rep, X, Y, x)) / (1.0 + x.norm() ** 2))
    return worst


def check_sigma_equivariance(rep, g_param, X, x, overrides=None):
    """sigma(X)(rho(g)x) against sigma(Ad(g^-1)X)(x)"""
    moved = sigma(rep, X, act(rep, g_param, x))
    pulled = sigma(rep, AlgebraElement(rep.algebra, Ad(-g_param) @ X.coords), x)
    tol = get_tolerance('sigma_equivariance', overrides) * (1.0 + x.norm() ** 2) * max(1.0, X.norm())
    return CheckReport('sigma_equivariance', abs(moved - pulled), tol,
                       {'g_param': g_param.coords.tolist(), 'X': X.coords.tolist(), 'x': _state_witness(x)})


def check_moment_sigma(rep, X, x, overrides=None):
    """mu(x)(X) and sigma(X)(x) through their separate code paths"""
    defect = abs(moment(rep, x).pair(X) - sigma(rep, X, x))
    tol = get_tolerance('moment_sigma', overrides) * max(1.0, X.norm()) * (1.0 + x.norm() ** 2)
    return CheckReport('moment_sigma', defect, tol, {'X': X.coords.tolist(), 'x': _state_witness(x)})


# -- Checks on mu -------------------------------------------------------------

def check_moment_differential(rep, x, y, overrides=None):
    """Closed-form d mu(x)y against central differences and against omega(rho'(X_i)x, y)"""
    _check_compatible(rep, y)
    exact = d_moment(rep, x) @ y.to_real()
    closed_form = np.array([omega(StateVector(rep.space, A @ x.components), y) for A in rep.generators])
    h = FD_STEP * (1.0 + x.norm())
    fd = (moment(rep, x + h * y).coords - moment(rep, x - h * y).coords) / (2.0 * h)
    defect = max(relative_error(fd, exact), relative_error(closed_form, exact))
    return CheckReport('d_moment', defect, get_tolerance('d_moment_fd', overrides),
                       {'x': _state_witness(x), 'y': _state_witness(y)})


def check_image_annihilator(rep, x, overrides=None):
    """Image of d mu(x) is the annihilator of the isotropy algebra"""
    D = d_moment(rep, x)
    iso = isotropy_algebra(rep, x)
    rank = 0 if x.norm() == 0.0 else numerical_rank(D, SVD_RTOL)
    expected_rank = rep.algebra.dim - iso.shape[1]
    scale = max(1.0, float(np.max(np.abs(D), initial=0.0)))
    pairing = float(np.max(np.abs(iso.T @ D), initial=0.0)) / scale
    defect = max(pairing, float(abs(rank - expected_rank)))
    return CheckReport('image_annihilator', defect, get_tolerance('annihilator', overrides), {
        'x': _state_witness(x), 'rank': rank, 'isotropy_dim': iso.shape[1],
        'expected_rank': expected_rank, 'max_pairing': pairing,
    })


def check_kernel_annihilator(rep, x, overrides=None):
    """Kernel of d mu(x) is the omega-annihilator of the orbit tangent space"""
    real_dim = rep.space.real_dim
    if x.norm() == 0.0:
        kernel = np.eye(real_dim)
        tangent = np.zeros((real_dim, 0))
    else:
        kernel = null_space_basis(d_moment(rep, x), SVD_RTOL)
        tangent = range_basis(orbit_tangent_matrix(rep, x), SVD_RTOL)
    W = omega_matrix(rep.dim)
    pairing = float(np.max(np.abs(kernel.T @ W @ tangent), initial=0.0))
    expected = real_dim - tangent.shape[1]
    defect = max(pairing, float(abs(kernel.shape[1] - expected)))
    return CheckReport('kernel_annihilator', defect, get_tolerance('annihilator', overrides), {
        'x': _state_witness(x), 'kernel_dim': kernel.shape[1], 'tangent_dim': tangent.shape[1],
        'expected_kernel_dim': expected, 'max_pairing': pairing,
    })


def check_equivariance(rep, g_param, x, overrides=None):
    """|Ad'(g) mu(x) - mu(rho(g)x)|_inf, through exp(ad) on one side and exp(rho') on the other"""
    lhs = coadjoint(g_param, moment(rep, x))
    rhs = moment(rep, act(rep, g_param, x))
    defect = float(np.max(np.abs(lhs.coords - rhs.coords)))
    tol = get_tolerance('equivariance', overrides) * (1.0 + x.norm() ** 2)
    return CheckReport('equivariance', defect, tol, {'g_param': g_param.coords.tolist(), 'x': _state_witness(x)})


def pullback(rep, f):
    """mu*f = f o mu, with gradient rho'(df(mu(x)))x"""
    require_same_algebra(rep.algebra, f.algebra)

    def value(x):
        return f(moment(rep, x))

    def gradient(x):
        return StateVector(rep.space, rho_prime(rep, f.differential(moment(rep, x))) @ x.components)

    return Observable(rep.space, value, gradient, label=f"pullback {f.label}".strip())


def check_poisson_morphism(rep, f1, f2, x, overrides=None):
    """{mu*f1, mu*f2}(x) against the Lie-Poisson bracket {f1, f2}(mu(x))"""
    lhs = poisson(pullback(rep, f1), pullback(rep, f2), x)
    rhs = lie_poisson_bracket(f1, f2, moment(rep, x))
    exact = f1.has_exact_gradient and f2.has_exact_gradient
    tol = get_tolerance('poisson_exact' if exact else 'poisson_fd', overrides)
    defect = abs(lhs - rhs) / max(1.0, abs(rhs))
    return CheckReport('poisson_morphism' if exact else 'poisson_morphism_fd', defect, tol,
                       {'x': _state_witness(x), 'lhs': lhs, 'rhs': rhs, 'f1': f1.label, 'f2': f2.label})


# -- Hamiltonian flow ----------------------------------------------------------

def hamiltonian_flow(rep, X, x0, t):
    """Integrate x' = rho'(X)x, the flow of grad sigma(X), from x0 over [0, t]"""
    _check_compatible(rep, x0)
    if not np.isfinite(t):
        raise DomainError(f"Flow time must be finite, got {t}")
    if t == 0:
        return x0
    M = real_matrix(rho_prime(rep, X))
    solution = solve_ivp(lambda s, y: M @ y, (0.0, float(t)), x0.to_real(),
                         method=FLOW_METHOD, rtol=FLOW_RTOL, atol=FLOW_ATOL)
    if not solution.success:
        raise NumericError(f"Flow integration failed: {solution.message}", {
            'status': int(solution.status),
            't_reached': float(solution.t[-1]),
            'nfev': int(solution.nfev),
            'X': X.coords.tolist(),
            't': float(t),
        })
    logger.debug("Flow to t=%g took %d evaluations", t, solution.nfev)
    return rep.space.from_real(solution.y[:, -1])


def check_flow(rep, X, x0, t, overrides=None):
    """Integrated flow vs rho(exp tX)x0, with norm and sigma(X) conservation"""
    flowed = hamiltonian_flow(rep, X, x0, t)
    exact = act(rep, float(t) * X, x0)
    drift = (flowed - exact).norm()
    norm_drift = abs(flowed.norm() - x0.norm())
    energy_drift = abs(moment(rep, flowed).pair(X) - moment(rep, x0).pair(X))
    tol = get_tolerance('flow', overrides) * max(1.0, x0.norm() ** 2) * max(1.0, X.norm())
    return CheckReport('flow', max(drift, norm_drift, energy_drift), tol, {
        'X': X.coords.tolist(), 'x0': _state_witness(x0), 't': float(t),
        'state_error': drift, 'norm_drift': norm_drift, 'energy_drift': energy_drift,
    })


# -- Sphere image ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereImage:
    """mu evaluated on seeded uniform unit vectors"""

    algebra: object
    coords: np.ndarray
    state_norms: np.ndarray
    seed: int

    def __len__(self):
        return self.coords.shape[0]

    def __getitem__(self, index):
        return DualVector(self.algebra, self.coords[index])

    def support(self, X):
        """Empirical support function: max over samples of mu(x)(X)"""
        require_same_algebra(self.algebra, X.algebra)
        return float(np.max(self.coords @ X.coords))

    def to_frame(self):
        frame = pd.DataFrame(self.coords, columns=list(self.algebra.basis_labels))
        frame['norm_x'] = self.state_norms
        return frame


def sample_unit_states(dim, n_samples, rng):
    """Haar-uniform unit vectors in C^dim from normalised complex Gaussians"""
    states = rng.standard_normal((n_samples, dim)) + 1j * rng.standard_normal((n_samples, dim))
    return states / np.linalg.norm(states, axis=1, keepdims=True)


@performance_timer
def sphere_image_sample(rep, n_samples, seed, threads=None):
    """mu on n_samples uniform unit vectors; identical for a seed whatever the thread count"""
    ok, message = validate_samples(n_samples)
    if not ok:
        raise DomainError(message)

    def run(batch):
        size, rng = batch
        states = sample_unit_states(rep.dim, size, rng)
        return moment_batch(rep, states), np.linalg.norm(states, axis=1)

    parts = parallel_map(run, seeded_batches(int(n_samples), seed), threads)
    coords = np.concatenate([p[0] for p in parts])
    norms = np.concatenate([p[1] for p in parts])
    return SphereImage(rep.algebra, coords, norms, seed)


def support_value(rep, X):
    """sup over the unit sphere of mu(x)(X) = 1/2 largest eigenvalue of -i rho'(X)"""
    H = -1j * rho_prime(rep, X)
    H = 0.5 * (H + H.conj().T)
    return 0.5 * float(np.linalg.eigvalsh(H)[-1])


def sample_directions(algebra, n_directions, seed):
    """Uniform random unit directions in the algebra"""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n_directions, algebra.dim))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    return [AlgebraElement(algebra, u) for u in U]


def check_sphere_support(rep, image, directions, overrides=None):
    """Containment in and approach to the exact support function in each direction"""
    rows = []
    for X in directions:
        rows.append({'direction': X.coords.tolist(), 'exact': support_value(rep, X), 'empirical': image.support(X)})
    excess = [row['empirical'] - row['exact'] for row in rows]
    gap = [row['exact'] - row['empirical'] for row in rows]
    worst_excess = int(np.argmax(excess))
    worst_gap = int(np.argmax(gap))
    containment = CheckReport('sphere_containment', max(0.0, excess[worst_excess]),
                              get_tolerance('sphere_containment', overrides),
                              {'worst': rows[worst_excess], 'samples': len(image), 'seed': image.seed})
    convergence = CheckReport('sphere_convergence', max(0.0, gap[worst_gap]),
                              get_tolerance('sphere_convergence', overrides),
                              {'worst': rows[worst_gap], 'samples': len(image), 'seed': image.seed,
                               'per_direction': rows})
    return [containment, convergence]


# -- Suite -------------------------------------------------------------------

def _worst(name, reports):
    """Aggregate per-trial reports into the one with the largest defect/tolerance ratio"""
    worst = max(reports, key=lambda r: r.defect / r.tolerance if np.isfinite(r.defect) else np.inf)
    return CheckReport(name, worst.defect, worst.tolerance, {**worst.witness, 'trials': len(reports)})


def _random_quadratic(algebra, rng):
    Q = rng.standard_normal((algebra.dim, algebra.dim))
    return DualObservable.quadratic(algebra, Q + Q.T, rng.standard_normal(algebra.dim)).without_gradient()


@performance_timer
def run_check_suite(rep, seed, trials=None, overrides=None):
    """Every property check on one representation, in a fixed order"""
    counts = dict(SAMPLING_CONFIG)
    if trials is not None:
        ok, message = validate_samples(trials)
        if not ok:
            raise DomainError(message)
        for key in ('gradient_trials', 'homomorphism_trials', 'differential_trials', 'rank_points',
                    'equivariance_pairs', 'poisson_trials', 'flow_starts'):
            counts[key] = int(trials)

    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(10)]
    algebra, space = rep.algebra, rep.space
    reports = []

    rng = streams[0]
    for method in ('exact', 'finite_difference'):
        reports.append(_worst(f"grad_sigma_{method}", [
            grad_sigma_check(rep, random_element(algebra, rng), samples=1, seed=rng, method=method,
                             overrides=overrides)
            for _ in range(counts['gradient_trials'])
        ]))

    rng = streams[1]
    homomorphism = []
    for _ in range(counts['homomorphism_trials']):
        X, Y, x = random_element(algebra, rng), random_element(algebra, rng), random_state(space, rng)
        defect = abs(sigma_cocycle(rep, X, Y, x)) / (1.0 + x.norm() ** 2)
        homomorphism.append(CheckReport('sigma_homomorphism', defect,
                                        get_tolerance('sigma_homomorphism', overrides),
                                        {'X': X.coords.tolist(), 'Y': Y.coords.tolist(), 'x': _state_witness(x)}))
    reports.append(_worst('sigma_homomorphism', homomorphism))

    rng = streams[2]
    reports.append(_worst('moment_sigma', [
        check_moment_sigma(rep, random_element(algebra, rng), random_state(space, rng), overrides)
        for _ in range(counts['homomorphism_trials'])
    ]))
    reports.append(_worst('sigma_equivariance', [
        check_sigma_equivariance(rep, random_element(algebra, rng), random_element(algebra, rng),
                                 random_state(space, rng), overrides)
        for _ in range(counts['homomorphism_trials'])
    ]))

    rng = streams[3]
    reports.append(_worst('d_moment', [
        check_moment_differential(rep, random_state(space, rng), random_state(space, rng), overrides)
        for _ in range(counts['differential_trials'])
    ]))

    rng = streams[4]
    points = [space.zero(), space.basis(0)] + [random_state(space, rng) for _ in range(counts['rank_points'])]
    reports.append(_worst('image_annihilator', [check_image_annihilator(rep, x, overrides) for x in points]))
    reports.append(_worst('kernel_annihilator', [check_kernel_annihilator(rep, x, overrides) for x in points]))

    rng = streams[5]
    reports.append(_worst('equivariance', [
        check_equivariance(rep, random_element(algebra, rng), random_state(space, rng), overrides)
        for _ in range(counts['equivariance_pairs'])
    ]))

    rng = streams[6]
    linear, quadratic = [], []
    for _ in range(counts['poisson_trials']):
        x = random_state(space, rng)
        f1 = DualObservable.linear(random_element(algebra, rng))
        f2 = DualObservable.linear(random_element(algebra, rng))
        linear.append(check_poisson_morphism(rep, f1, f2, x, overrides))
        quadratic.append(check_poisson_morphism(rep, _random_quadratic(algebra, rng),
                                                _random_quadratic(algebra, rng), x, overrides))
    reports.append(_worst('poisson_morphism', linear))
    reports.append(_worst('poisson_morphism_fd', quadratic))

    rng = streams[7]
    flows = []
    for _ in range(counts['flow_starts']):
        X = random_element(algebra, rng)
        x0 = random_state(space, rng)
        x0 = x0 * (1.0 / x0.norm())
        for t in counts['flow_times']:
            flows.append(check_flow(rep, X, x0, t, overrides))
    reports.append(_worst('flow', flows))

    failed = [r.check for r in reports if not r.passed]
    if failed:
        logger.warning("%s: failing checks %s", rep.label or 'representation', ', '.join(failed))
    return reports

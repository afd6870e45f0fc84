# Numerical configuration for momentlab: tolerances, sampling plans, env settings

import logging
import os

from utils import ConfigError

logger = logging.getLogger(__name__)

# Structural identities sit at 1e-10..1e-12; anything with finite differences at 1e-6
TOLERANCE_CONFIG = {
    'structure': 1e-10,           # antisymmetry and Jacobi of structure constants
    'skew_hermitian': 1e-12,      # A^H + A, entrywise
    'homomorphism': 1e-10,        # rho'([Xi,Xj]) vs commutator
    'omega_identity': 1e-12,      # Re<x,y> = omega(ix, y)
    'locally_hamiltonian': 1e-10,
    'grad_exact': 1e-10,
    'grad_fd': 1e-6,
    'sigma_homomorphism': 1e-9,   # scaled by 1 + |x|^2
    'sigma_equivariance': 1e-9,
    'moment_sigma': 1e-12,        # both code paths for mu(x)(X), scaled by |X|(1 + |x|^2)
    'd_moment_fd': 1e-6,
    'annihilator': 1e-9,
    'equivariance': 1e-9,         # scaled by 1 + |x|^2
    'poisson_exact': 1e-9,
    'poisson_fd': 1e-6,
    'flow': 1e-8,
    'sphere_containment': 1e-12,
    'sphere_convergence': 5e-3,
}

# Trial counts per check, matching the acceptance plan
SAMPLING_CONFIG = {
    'gradient_trials': 100,
    'homomorphism_trials': 100,
    'differential_trials': 100,
    'rank_points': 50,
    'equivariance_pairs': 1000,
    'poisson_trials': 100,
    'flow_starts': 20,
    'flow_times': (0.1, 1.0),
    'sphere_directions': 50,
    'sphere_samples': 100_000,
    'chunk_size': 4096,           # fixed so results do not depend on thread count
}

FD_STEP = 1e-5          # central differences, scaled by 1 + |point|
SVD_RTOL = 1e-10        # nullspace threshold relative to the largest singular value
FLOW_RTOL = 1e-10
FLOW_ATOL = 1e-12
FLOW_METHOD = 'DOP853'

DEFAULT_SEED = 20240517


def get_thread_count():
    """Worker cap for sampling loops, from MOMENTLAB_THREADS"""
    raw = os.getenv('MOMENTLAB_THREADS', '1')
    try:
        threads = int(raw)
    except ValueError:
        logger.warning("Ignoring MOMENTLAB_THREADS=%r: not an integer", raw)
        return 1
    return max(1, threads)


def get_log_level():
    """Log level name from MOMENTLAB_LOG_LEVEL"""
    return os.getenv('MOMENTLAB_LOG_LEVEL', 'WARNING').upper()


def get_tolerance(name, overrides=None):
    """Resolve a named tolerance, honouring command-line overrides"""
    if overrides and name in overrides:
        return float(overrides[name])
    if name not in TOLERANCE_CONFIG:
        raise ConfigError(f"Unknown tolerance '{name}'. Known: {', '.join(sorted(TOLERANCE_CONFIG))}")
    return TOLERANCE_CONFIG[name]


def parse_tolerance_overrides(items):
    """Parse repeated 'check=value' strings into a dict"""
    overrides = {}
    for item in items or ():
        name, sep, value = item.partition('=')
        name = name.strip()
        if not sep or not name:
            raise ConfigError(f"Tolerance override must look like check=value, got '{item}'")
        if name not in TOLERANCE_CONFIG:
            raise ConfigError(f"Unknown tolerance '{name}'")
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"Tolerance '{name}' needs a number, got '{value}'")
        if not number > 0:
            raise ConfigError(f"Tolerance '{name}' must be positive")
        overrides[name] = number
    return overrides

import numpy as np
import pytest

from cli import parse_rep_source

# Representations the acceptance runs cover
SHIPPED_SOURCES = [
    'su2:spin=0.5',
    'su2:spin=1',
    'su2:spin=1.5',
    'su2:spin=2',
    'sum(su2:spin=0.5,su2:spin=1)',
    'tensor(su2:spin=0.5,su2:spin=0.5)',
    'torus:dim=2,weights=[[1,0],[0,1],[1,1]]',
    'torus:dim=1,weights=[[1],[-2]]',
]

SPIN_SOURCES = SHIPPED_SOURCES[:4]


@pytest.fixture(params=SHIPPED_SOURCES)
def rep(request):
    return parse_rep_source(request.param)


@pytest.fixture(params=SPIN_SOURCES)
def spin_rep(request):
    return parse_rep_source(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)

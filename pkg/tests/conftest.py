import pytest

from cycalc.algebra import build_polynomial, catalog, dual_numbers, upper_triangular
from cycalc.testring import truncated_polynomial


@pytest.fixture(scope='session')
def q():
    return build_polynomial(0)


@pytest.fixture(scope='session')
def qx():
    return build_polynomial(1, weight_bound=3)


@pytest.fixture(scope='session')
def qxy():
    return catalog('Q[x,y]', weight_bound=2)


@pytest.fixture(scope='session')
def k2():
    return dual_numbers(arity_bound=3)


@pytest.fixture(scope='session')
def t2():
    return upper_triangular(arity_bound=3)


@pytest.fixture(scope='session')
def ring2():
    return truncated_polynomial(2)


@pytest.fixture(scope='session')
def ring3():
    return truncated_polynomial(3)

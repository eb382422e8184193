import pytest

from cycalc.errors import AlgebraValidationError, ConfigError
from cycalc.exactla import SparseVector
from cycalc.testring import (
    RElement, TestRing, ring_from_json, square_zero_two_variables, truncated_polynomial, truncation_extension,
)


@pytest.mark.parametrize('n', [1, 2, 3, 5])
def test_truncated_polynomial_nil_order(n):
    ring = truncated_polynomial(n)
    assert ring.dim == n
    assert ring.nil_order == n
    assert ring.name == f"Q[e]/(e^{n})"


def test_truncated_polynomial_products_vanish_past_the_top(ring3):
    e = ring3.element(1)
    assert ring3.mul(e, e) == SparseVector({2: 1})
    assert ring3.mul(ring3.mul(e, e), e).is_zero()


def test_truncated_polynomial_range():
    with pytest.raises(ConfigError):
        truncated_polynomial(0)
    with pytest.raises(ConfigError):
        truncated_polynomial(9)


def test_square_zero_ring():
    ring = square_zero_two_variables()
    assert ring.nil_order == 2
    assert ring.multiply(1, 2).is_zero()


def test_ring_from_json_round_trip(ring2):
    data = {'name': 'dual', 'basis': ['1', 'e'], 'm_basis': [1],
            'mult': [[0, 0, [[1, 0]]], [0, 1, [[1, 1]]], [1, 0, [[1, 1]]]]}
    ring = ring_from_json(data)
    assert ring.nil_order == 2
    assert ring.mult_table == ring2.mult_table


def test_malformed_ring_json():
    with pytest.raises(ConfigError):
        ring_from_json({'basis': ['1']})


def test_non_commutative_table_is_rejected():
    table = {(0, 0): SparseVector({0: 1}), (0, 1): SparseVector({1: 1}), (1, 0): SparseVector({1: 1}),
             (0, 2): SparseVector({2: 1}), (2, 0): SparseVector({2: 1}), (1, 2): SparseVector({2: 1})}
    ring = TestRing(name='bad', basis=('1', 'a', 'b'), mult_table=table, m_basis=(1, 2))
    with pytest.raises(AlgebraValidationError):
        ring.validate()


def test_truncation_extension():
    ext = truncation_extension(2)
    assert ext.source.dim == 3
    assert ext.target.dim == 2
    assert ext.project(2).is_zero()
    assert ext.project(1) == SparseVector({1: 1})


def test_r_elements_are_linear(ring3):
    v = SparseVector({'a': 1})
    w = SparseVector({'b': 2})
    x = RElement(ring3, {1: v})
    y = RElement(ring3, {1: w, 2: v})
    assert (x + y) - y == x
    assert (x - x).is_zero()
    assert -x == x.scaled(-1)
    assert x.in_ideal()
    assert not RElement.constant(ring3, v).in_ideal()


def test_ring_multiplication_of_r_elements(ring3):
    v = SparseVector({'a': 1})
    x = RElement(ring3, {1: v})
    assert x.times_ring(ring3.element(1)) == RElement(ring3, {2: v})
    assert x.times_ring(ring3.element(2)).is_zero()
    square = x.bilinear(lambda a, b: a.scaled(2), x)
    assert square == RElement(ring3, {2: SparseVector({'a': 2})})

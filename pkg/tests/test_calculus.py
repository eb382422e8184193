import pytest

from cycalc.calculus import (
    ChainWindow, CochainWindow, Operator, bracket, brace, connes_B, contraction, cup, differential, hoch_b,
    lie_L, mu_cochain, op_B, op_b, op_L, truncate, unit_cochain, u_operator, u_series,
)
from cycalc.exactla import SparseVector


def derivative(algebra, top):
    """d/dx on x^1 .. x^top"""
    return SparseVector({((algebra.monomial((k,)),), algebra.monomial((k - 1,))): k for k in range(1, top + 1)})


def euler(algebra, top):
    """x d/dx on x^1 .. x^top"""
    return SparseVector({((algebra.monomial((k,)),), algebra.monomial((k,))): k for k in range(1, top + 1)})


def test_mu_is_minus_product(k2):
    assert mu_cochain(k2) == SparseVector({((0, 0), 0): -1, ((0, 1), 1): -1, ((1, 0), 1): -1})


def test_b_in_degree_one_is_commutator(t2):
    assert hoch_b(t2, SparseVector({(2, 1): 1})) == SparseVector({(2,): 1})
    assert hoch_b(t2, SparseVector({(1, 2): 1})) == SparseVector({(2,): -1})


def test_b_in_degree_two(qx):
    # b(1 (x) x (x) x) = 2 x (x) x - 1 (x) x^2
    assert hoch_b(qx, SparseVector({(0, 1, 1): 1})) == SparseVector({(1, 1): 2, (0, 2): -1})


def test_connes_B_on_degree_zero(qx):
    assert connes_B(qx, SparseVector({(1,): 1})) == SparseVector({(0, 1): 1})
    assert connes_B(qx, SparseVector({(0,): 1})).is_zero()


def test_contraction_of_arity_one(qx):
    f = SparseVector({((1,), 2): 1})
    assert contraction(qx, f, SparseVector({(0, 1): 1})) == SparseVector({(2,): 1})
    assert contraction(qx, f, SparseVector({(1, 1): 1})) == SparseVector({(3,): 1})


def test_lie_derivative_of_derivation(qx):
    d = derivative(qx, 3)
    # the unit output in position 1 is dropped on normalized chains
    assert lie_L(qx, d, SparseVector({(1, 1): 1})) == SparseVector({(0, 1): 1})
    assert lie_L(qx, d, SparseVector({(0, 1): 1})).is_zero()


def test_unit_cup_is_identity(qx):
    y = derivative(qx, 3)
    assert cup(qx, unit_cochain(qx), y) == y


def test_differential_of_element(t2):
    assert differential(t2, SparseVector({((), 2): 1})) == SparseVector({((1,), 2): -1})


def test_derivations_are_closed(qx):
    d = derivative(qx, 3)
    assert truncate(qx, differential(qx, d), 3).is_zero()


def test_bracket_of_vector_fields(qx):
    assert bracket(qx, derivative(qx, 3), euler(qx, 3)) == derivative(qx, 3)


def test_mu_squares_to_zero(k2, t2):
    for algebra in (k2, t2):
        mu = mu_cochain(algebra)
        assert bracket(algebra, mu, mu).is_zero()


def test_brace_with_no_arguments_is_identity(k2):
    x = SparseVector({((1,), 1): 3})
    assert brace(k2, x, []) == x


def test_structure_identities_on_window(t2):
    window = ChainWindow(t2)
    b, B = op_b(t2), op_B(t2)
    for key in window.all_keys():
        if len(key) > window.arity_bound:
            continue
        chain = SparseVector({key: 1})
        assert b(b(chain)).is_zero()
        assert B(B(chain)).is_zero()
        assert (b(B(chain)) + B(b(chain))).is_zero()


def test_unnormalized_B_does_not_commute_with_L(k2):
    f = SparseVector({((0,), 0): 1})
    commutator = op_B(k2, normalized=False).commutator(op_L(k2, f, normalized=False))
    assert commutator(SparseVector({(0,): 1})) == SparseVector({(0, 0): -2})


def test_operator_commutator_degrees(k2):
    b, B = op_b(k2), op_B(k2)
    assert b.commutator(B).degree == 0
    assert Operator.identity().compose(b).degree == 1


def test_u_operator_truncates(qx):
    B = op_B(qx)
    shifted = u_operator({1: B}, upper=1)
    series = u_series(SparseVector({(1,): 1}), 1)
    assert shifted(series).is_zero()
    assert shifted(u_series(SparseVector({(1,): 1}))) == SparseVector({(1, (0, 1)): 1})


def test_hochschild_homology_of_polynomial_ring(qx):
    window = ChainWindow(qx)
    for w in (1, 2, 3):
        assert window.hochschild_homology(0, w).dim == 1
        assert window.hochschild_homology(1, w).dim == 1
        assert window.hochschild_homology(2, w).dim == 0


def test_hochschild_homology_of_q(q):
    window = ChainWindow(q)
    assert window.hochschild_homology(0, 0).dim == 1
    assert window.hochschild_homology(1, 0).dim == 0


@pytest.mark.parametrize('arity, delta, expected', [
    (0, 0, 1), (0, 1, 1), (1, -1, 1), (1, 0, 1), (2, 0, 0), (2, -1, 0),
])
def test_hochschild_cohomology_of_polynomial_ring(qx, arity, delta, expected):
    window = CochainWindow(qx)
    window.check_complex(arity, delta)
    assert window.cohomology(arity, delta).dim == expected

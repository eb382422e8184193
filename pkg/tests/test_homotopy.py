import pytest

from cycalc.calculus import ChainWindow, Operator, differential, op_b, op_i
from cycalc.errors import WindowTooSmall
from cycalc.exactla import SparseVector
from cycalc.homotopy import (
    OperatorEquation, OperatorSystem, OperatorUnknown, SAssignment, commutator_terms, insertion_coefficients,
    verify_identities, word_algebra,
)


@pytest.mark.parametrize('arity, delta', [(0, 0), (0, 1), (1, -1), (1, 0), (2, 0), (2, -1)])
def test_s_satisfies_homotopy_formula_on_polynomial_ring(qx, arity, delta):
    assignment = SAssignment(qx)
    assert assignment.verify_block(arity, delta) is None


@pytest.mark.parametrize('arity, delta', [(0, 0), (0, 1), (1, 0), (1, -1), (2, 0)])
def test_s_satisfies_homotopy_formula_on_dual_numbers(k2, arity, delta):
    assignment = SAssignment(k2)
    assert assignment.verify_block(arity, delta) is None


def test_insertion_coefficients_on_a_single_letter():
    # S_x(a) = (1, a, x()) for an arity-0 cochain x
    coefficients = insertion_coefficients(0)
    assert coefficients[(0, 0, 0, 0)] == 1
    assert (0, 0, 0, 1) not in coefficients


def test_word_algebra_keeps_only_adjacent_pairs():
    algebra, index = word_algebra(['g0', 'g1', 'X'], [('g0', 'g1'), ('g0', 'X')])
    g0, g1, X = index[('g0',)], index[('g1',)], index[('X',)]
    assert algebra.multiply(g0, g1) == SparseVector({index[('g0', 'g1')]: 1})
    assert algebra.multiply(X, g0) == SparseVector({index[('X', 'g0')]: 1})
    assert not algebra.multiply(g1, X)
    assert not algebra.multiply(index[('g0', 'g1')], g0)


def test_s_is_defined_off_cocycles(qx):
    assignment = SAssignment(qx)
    x = SparseVector({((1,), 2): 1})
    assert not differential(qx, x).is_zero()
    assert any(not assignment.S(x).basis_image(c).is_zero() for c in assignment.chain_domain(1))
    assert assignment.verify_block(1, 1, keys=[((1,), 2)]) is None


def test_s_has_degree_one_below_cochain(qx):
    assignment = SAssignment(qx)
    x = SparseVector({((1,), 1): 1})
    assert assignment.S(x).degree == -1
    assert assignment.I(x).degree == 1


def test_operator_system_recovers_a_commutator(k2):
    b = op_b(k2)
    a = SparseVector({((), 1): 1})
    target = b.commutator(op_i(k2, a))
    domain = ChainWindow(k2).all_keys()
    assignment = SAssignment(k2)
    unknown = OperatorUnknown('X', 0, domain, assignment.codomain_for(0, 1))
    system = OperatorSystem([unknown], [OperatorEquation('b', commutator_terms('X', b, 0, 1), domain)])
    X = system.solve({'b': target})['X']
    for chain in domain:
        assert b.commutator(X).basis_image(chain) == target.basis_image(chain)


def test_operator_system_reports_inconsistency(k2):
    b = op_b(k2)
    domain = ChainWindow(k2).all_keys()
    assignment = SAssignment(k2)
    unknown = OperatorUnknown('X', -1, domain, assignment.codomain_for(-1, 0))
    system = OperatorSystem([unknown], [OperatorEquation('b', commutator_terms('X', b, -1, 1), domain)])
    # HH_0 is nonzero, so the identity is not null-homotopic
    identity = Operator.identity()
    assert not system.is_solvable({'b': identity})
    with pytest.raises(WindowTooSmall) as info:
        system.solve({'b': identity})
    assert info.value.certificate


def test_identity_suite_on_q(q):
    report = verify_identities(q, seed=1, count=5)
    assert report.passed
    assert report.window == {'W': 0, 'N': q.arity_bound}


@pytest.fixture(scope='module')
def k2_report(k2):
    return verify_identities(k2, seed=7, count=12, lemma_trials=3)


@pytest.fixture(scope='module')
def qx_report(qx):
    return verify_identities(qx, seed=7, count=12, lemma_trials=3)


@pytest.mark.parametrize('identity', [
    'b-squared', 'B-squared', 'bB+Bb', 'mu-mu-bracket', 'd-squared', 'bracket-antisymmetry',
    'contraction-cup', 'lie-bracket', 'b-lie-commutator', 'b-contraction-commutator', 'B-lie-commutator',
    'total-lie-commutator', 'cartan-homotopy', 'cartan-homotopy-u2', 'u-divisibility',
    'null-homotopy-u0', 'null-homotopy',
])
def test_identity_suite_on_dual_numbers(k2_report, identity):
    result = k2_report.result(identity)
    assert result.passed, result.failures


@pytest.mark.parametrize('identity', [
    'b-squared', 'B-squared', 'bB+Bb', 'mu-mu-bracket', 'd-squared', 'bracket-antisymmetry',
    'contraction-cup', 'lie-bracket', 'b-lie-commutator', 'b-contraction-commutator', 'B-lie-commutator',
    'total-lie-commutator', 'cartan-homotopy', 'cartan-homotopy-u2', 'u-divisibility',
    'null-homotopy-u0', 'null-homotopy',
])
def test_identity_suite_on_polynomial_ring(qx_report, identity):
    result = qx_report.result(identity)
    assert result.passed, result.failures


def test_unnormalized_control_fails(k2_report):
    result = k2_report.result('B-lie-unnormalized')
    assert result.expect_failure
    assert result.failures
    assert result.passed


def test_report_json_is_deterministic(k2):
    first = verify_identities(k2, seed=5, count=3, lemma_trials=1).to_json()
    second = verify_identities(k2, seed=5, count=3, lemma_trials=1).to_json()
    assert first == second
    assert first['algebra'] == 'K2'


def test_full_harness_passes_on_q(q):
    report = verify_identities(q, seed=3, count=6, lemma_trials=2)
    assert report.passed, [r.identity_id for r in report.results if not r.passed]


def test_full_harness_reaches_the_u2_homotopy(qx_report):
    assert qx_report.passed, [r.identity_id for r in qx_report.results if not r.passed]
    assert qx_report.result('cartan-homotopy-u2').trials > 0

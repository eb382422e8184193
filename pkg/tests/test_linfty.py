from fractions import Fraction

import pytest

from cycalc.calculus import make_rng, u_series
from cycalc.commutative import BVMinus, PolyCalculus, VolumeForm
from cycalc.cydeform import DeformationDGLA
from cycalc.duality import CYStructure
from cycalc.errors import ConfigError, NotMaurerCartan, RelationFailure, TruncationExceeded
from cycalc.exactla import SparseVector
from cycalc.linfty import (
    DGModule, LinfAlgebra, LinfDGLA, StrictMorphism, bvminus_check, from_dgla, homotopy_abelian_psi,
    identity_morphism, pullback_module, semidirect, series_comparison_report, series_to_semidirect, twist, unit,
)
from cycalc.mc import CochainDGLA, SemidirectDGLA, TableDGLA, TableModule, TwistedDGLA, tagged


@pytest.fixture(scope='module')
def twistable():
    """w, y in degree 1 with dw = z, [y, y] = z; x acts with weights 1, 1/2, 1 on w, y, z"""
    degrees = {'x': 0, 'w': 1, 'y': 1, 'z': 2}
    brackets = {
        ('y', 'y'): {'z': 1},
        ('x', 'w'): {'w': 1},
        ('x', 'y'): {'y': Fraction(1, 2)},
        ('x', 'z'): {'z': 1},
    }
    return TableDGLA(degrees, d={'w': {'z': 1}}, brackets=brackets, name='twistable')


@pytest.fixture(scope='module')
def omega():
    """Maurer-Cartan: d(-w/2) + [y, y]/2 = 0"""
    return SparseVector({'y': 1, 'w': Fraction(-1, 2)})


@pytest.fixture(scope='module')
def lie_with_module():
    g = TableDGLA({'a': 0, 'b': 0, 'c': 0, 't': 1}, brackets={('a', 'b'): {'c': 1}, ('a', 't'): {'t': 1}})
    action = {('a', 'p'): {'q': 1}, ('a', 'q'): {'s': 1}, ('b', 'p'): {'s': 1}, ('a', 'r'): {'v': 1}}
    return g, TableModule({'p': 0, 'q': 0, 's': 0, 'r': 1, 'v': 1}, action)


@pytest.fixture(scope='module')
def line_bv():
    return BVMinus(VolumeForm.standard(PolyCalculus(1)), u_bound=2, sample_degree=1)


@pytest.fixture(scope='module')
def plane_bv():
    return BVMinus(VolumeForm.standard(PolyCalculus(2)), u_bound=2, sample_degree=1)


def all_keys(linf, degrees=(-1, 0, 1)):
    return [k for degree in degrees for k in linf.keys(degree)]


def test_dgla_embedding_round_trips(twistable):
    back = LinfDGLA(from_dgla(twistable))
    keys = sorted(twistable.degrees)
    for a in keys:
        assert back.degree(a) == twistable.degree(a)
        assert back.d_basis(a) == twistable.d_basis(a)
        for b in keys:
            assert back.bracket_basis(a, b) == twistable.bracket_basis(a, b)


def test_dglas_satisfy_the_relations(twistable, k2):
    assert twistable.structure_failures(make_rng(0), 6, degrees=(0, 1)) == []
    assert from_dgla(twistable).relation_failures(make_rng(1), 4, degrees=(-1, 0, 1)) == []
    assert from_dgla(CochainDGLA(k2), 3).relation_failures(make_rng(2), 2) == []


def test_relation_failures_name_the_arity():
    broken = TableDGLA({'x': 0, 'y': 0, 'z': 1}, d={'x': {'z': 1}}, brackets={('x', 'y'): {'x': 1}})
    linf = from_dgla(broken, 3)
    assert linf.relation([unit('x'), unit('y')])
    with pytest.raises(RelationFailure) as info:
        linf.verified(make_rng(0), 20, degrees=(-1,))
    assert info.value.arity == 2


def test_unknown_higher_brackets_have_no_dgla():
    with pytest.raises(ConfigError):
        LinfDGLA(LinfAlgebra())


def test_semidirect_matches_the_dgla_semidirect(lie_with_module):
    g, module = lie_with_module
    linf = from_dgla(g)
    product = semidirect(linf, DGModule(linf, module), make_rng(3), samples=3)
    expected = from_dgla(SemidirectDGLA(g, module))
    keys = all_keys(expected, (-1, 0))
    assert sorted(keys) == sorted(all_keys(product, (-1, 0)))
    for a in keys:
        assert product.basis_image((a,)) == expected.basis_image((a,))
        for b in keys:
            assert product.basis_image((a, b)) == expected.basis_image((a, b))


def test_zero_module_leaves_the_algebra_unchanged(twistable):
    linf = from_dgla(twistable)
    product = semidirect(linf, DGModule(linf, TableModule({}, {})))
    for a in all_keys(linf):
        assert product.basis_image((('g', a),)) == tagged('g', linf.basis_image((a,)))


def test_two_module_slots_vanish(lie_with_module):
    g, module = lie_with_module
    linf = from_dgla(g)
    product = semidirect(linf, DGModule(linf, module))
    assert product.basis_image((('m', 'p'), ('m', 'r'))).is_zero()


def test_module_over_another_algebra_is_rejected(lie_with_module, twistable):
    g, module = lie_with_module
    with pytest.raises(ConfigError):
        semidirect(from_dgla(twistable), DGModule(from_dgla(g), module))


@pytest.fixture(scope='module')
def deformations(k2):
    unit_eta = u_series(SparseVector({(k2.unit,): 1}))
    return DeformationDGLA(CYStructure(k2, 0, unit_eta), u_bound=1)


def test_twisted_semidirect_is_the_deformation_dgla(deformations):
    cochains = from_dgla(deformations.cochains, 3)
    product = semidirect(cochains, DGModule(cochains, deformations.module))
    twisted = twist(product, deformations.twist)
    expected = from_dgla(deformations, 3)
    rng = make_rng(4)
    for _ in range(6):
        x = expected.random_element(rng, rng.choice((-1, 0)))
        y = expected.random_element(rng, rng.choice((-1, 0)))
        assert product.coefficient([x, y]) == from_dgla(deformations.semidirect).coefficient([x, y])
        assert twisted.coefficient([x]) == expected.coefficient([x])
        assert twisted.coefficient([x, y]) == expected.coefficient([x, y])


def test_shifted_modules_keep_the_relations(deformations):
    cochains = from_dgla(deformations.cochains, 3)
    module = DGModule(cochains, deformations.module)
    for m in (1, 2):
        shifted = module.shifted(m)
        assert shifted.keys(-1 - m) == module.keys(-1)
        assert semidirect(cochains, shifted).relation_failures(make_rng(m), 2) == []


def test_pullback_along_the_identity(lie_with_module):
    g, module = lie_with_module
    linf = from_dgla(g)
    V = DGModule(linf, module)
    pulled, _ = pullback_module(identity_morphism(linf), V)
    for x in all_keys(linf, (-1,)):
        for v in V.keys(-1) + V.keys(0):
            assert pulled.basis_image((x,), v) == V.basis_image((x,), v)
            assert pulled.basis_image((), v) == V.basis_image((), v)


def test_pullback_along_a_strict_morphism():
    heisenberg = from_dgla(TableDGLA({'a': 0, 'b': 0, 'c': 0}, brackets={('a', 'b'): {'c': 1}}, name='heis'))
    plane = from_dgla(TableDGLA({'p': 0, 'q': 0}, name='ab'))
    images = {'a': {'p': 1}, 'b': {'q': 1}, 'c': {}}
    psi = StrictMorphism(heisenberg, plane, lambda k: images[k])
    module = TableModule({'v': 0, 'w': 0, 'z': 0}, {('p', 'v'): {'w': 1}, ('q', 'v'): {'z': 1}})
    V = DGModule(plane, module)
    pulled, psi_v = pullback_module(psi, V)
    rng = make_rng(5)
    assert psi.relation_failures(rng, 4) == []
    assert pulled.act([unit('a')], unit('v')) == V.act([unit('p')], unit('v'))
    assert pulled.act([unit('c')], unit('v')).is_zero()
    assert semidirect(heisenberg, pulled).relation_failures(rng, 3) == []
    assert psi_v.relation_failures(rng, 3) == []


def test_twisting_a_dgla_gives_the_twisted_differential(twistable, omega):
    linf = from_dgla(twistable)
    twisted = twist(linf, omega)
    expected = from_dgla(TwistedDGLA(twistable, omega))
    keys = all_keys(linf)
    for a in keys:
        assert twisted.basis_image((a,)) == expected.basis_image((a,))
        for b in keys:
            assert twisted.basis_image((a, b)) == expected.basis_image((a, b))
    assert twisted.basis_image(('x',)) == SparseVector({'y': Fraction(1, 2), 'w': Fraction(-1, 2)})
    assert twisted.relation_failures(make_rng(6), 3, degrees=(-1, 0, 1)) == []


def test_twisting_by_zero_changes_nothing(twistable):
    linf = from_dgla(twistable)
    twisted = twist(linf, SparseVector())
    for a in all_keys(linf):
        assert twisted.basis_image((a,)) == linf.basis_image((a,))


def test_twisting_needs_a_maurer_cartan_element(twistable):
    linf = from_dgla(twistable)
    with pytest.raises(NotMaurerCartan):
        twist(linf, unit('y'))
    with pytest.raises(ConfigError):
        twist(linf, unit('x'))


def test_twisted_module_matches_the_twisted_semidirect(twistable, omega):
    linf = from_dgla(twistable)
    V = DGModule(linf, TableModule({'m': 0, 'n': 1}, {('w', 'm'): {'n': 1}, ('x', 'n'): {'n': 1}}))
    twisted_module = twist(V, omega)
    assert twisted_module.basis_image((), 'm') == SparseVector({'n': Fraction(1, 2)})
    left = semidirect(twisted_module.algebra, twisted_module)
    right = twist(semidirect(linf, V), tagged('g', omega))
    rng = make_rng(7)
    for _ in range(5):
        x = right.random_element(rng, rng.choice((-1, 0)))
        y = right.random_element(rng, rng.choice((-1, 0)))
        assert left.coefficient([x]) == right.coefficient([x])
        assert left.coefficient([x, y]) == right.coefficient([x, y])


def test_twisting_a_strict_morphism(twistable, omega):
    twisted = twist(identity_morphism(from_dgla(twistable)), omega)
    assert twisted.omega_prime == omega
    assert twisted.relation_failures(make_rng(8), 3, degrees=(-1, 0, 1)) == []


def test_twisting_needs_finitely_many_insertions(line_bv):
    u_x = SparseVector({(1, (1,), ()): 1})
    with pytest.raises(TruncationExceeded):
        twist(homotopy_abelian_psi(line_bv, 3), u_x)


# --- BV_- algebras -----------------------------------------------------------------

class DoubledBracket:
    def __init__(self, bv):
        self.bv = bv
        self.name = 'doubled'

    def __getattr__(self, attr):
        return getattr(self.bv, attr)

    def bracket(self, x, y):
        return self.bv.bracket(x, y).scaled(2)


@pytest.mark.parametrize('bv_name', ['line_bv', 'plane_bv'])
def test_polyvector_series_are_bvminus(request, bv_name):
    bv = request.getfixturevalue(bv_name)
    report = bvminus_check(bv, make_rng(9), 6, project=bv.exact)
    assert report['ok'], report['failures']


def test_wrong_bracket_is_caught(plane_bv):
    report = bvminus_check(DoubledBracket(plane_bv), make_rng(10), 10)
    assert not report['ok']
    assert report['failures']['bracket'] > 0


def test_homotopy_abelian_morphism(plane_bv):
    psi = homotopy_abelian_psi(plane_bv, 4)
    rng = make_rng(11)
    x = plane_bv.random_element(rng, 1)
    y = plane_bv.random_element(rng, 2)
    assert psi.coefficient([x]) == x
    assert psi.coefficient([x, y]) == plane_bv.product(x, y)
    report = psi.report(rng, 2, degrees=(0, 1))
    assert report['ok'], report['failures']
    assert report['arity_bound'] == 4


def test_homotopy_abelian_morphism_in_arity_one(line_bv):
    psi = homotopy_abelian_psi(line_bv, 1)
    assert psi.relation_failures(make_rng(12), 4, degrees=(0, 1)) == []


def test_series_map_starts_with_the_identity(line_bv):
    phi = series_to_semidirect(line_bv, 3)
    key = ('a', (1, (1,), (0,)))
    assert phi.coefficient([unit(key)]) == unit(key)
    assert phi.coefficient([unit(('g', ((0,), (0,)))), unit(key)]).is_zero()


def test_series_map_is_an_linfty_morphism(line_bv):
    report = series_comparison_report(line_bv, make_rng(13), 2, arity_bound=3)
    assert report['ok'], report
    assert {(case['i'], case['j']) for case in report['cases']} >= {(1, 0), (1, 1), (1, 2), (0, 3)}

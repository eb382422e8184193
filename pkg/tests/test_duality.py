from fractions import Fraction

import pytest

from cycalc.duality import CYStructure, Duality, catalog_structure, is_nondegenerate
from cycalc.errors import ConfigError, NotACycle
from cycalc.exactla import SparseVector


@pytest.fixture(scope='module')
def line_duality(qx):
    return Duality(catalog_structure(qx))


def test_catalog_structure_of_a_point(q):
    structure = catalog_structure(q)
    assert structure.dimension == 0
    assert structure.eta_hh == SparseVector({(0,): 1})
    assert is_nondegenerate(structure) == (True, None)


def test_catalog_structure_of_the_line(qx):
    structure = catalog_structure(qx)
    assert structure.eta_hh == SparseVector({(0, 1): 1})
    assert structure.weight == 1


def test_catalog_rejects_unknown_algebras(k2):
    with pytest.raises(ConfigError):
        catalog_structure(k2)


def test_line_is_nondegenerate(line_duality):
    assert line_duality.is_nondegenerate() == (True, None)
    for arity in (0, 1):
        for delta in line_duality.deltas():
            block = line_duality.block(arity, delta)
            assert block.matrix.domain_dim == block.matrix.codomain_dim <= 1


def test_zero_eta_is_degenerate(qx):
    structure = CYStructure(qx, 1, SparseVector())
    assert is_nondegenerate(structure) == (False, (0, 0))


def test_non_cycle_is_rejected(qx):
    structure = CYStructure(qx, 1, SparseVector({(0, (0, 1, 1)): 1}))
    with pytest.raises(NotACycle):
        Duality(structure)


def test_scaling_keeps_nondegeneracy(qx, line_duality):
    scaled = Duality(catalog_structure(qx).scaled(2))
    assert scaled.is_nondegenerate() == (True, None)
    b = SparseVector({(2,): 1})
    x, delta = line_duality.j(b)
    y, scaled_delta = scaled.j(b)
    assert delta == scaled_delta
    assert y == x.scaled(Fraction(1, 2))


@pytest.mark.parametrize('arity,delta', [(0, 0), (0, 1), (1, -1), (1, 0), (1, 2)])
def test_j_inverts_the_cap_product(line_duality, arity, delta):
    assert line_duality.j_round_trip(arity, delta)


def test_eta_is_the_unit_of_the_transported_product(line_duality):
    eta = line_duality.structure.eta_hh
    for b in (SparseVector({(1,): 1}), SparseVector({(2,): 3}), SparseVector({(1, 1): 1})):
        assert line_duality.same_class(line_duality.dot(eta, b), b)


def test_transported_product_multiplies_forms(line_duality):
    x_dx = SparseVector({(1, 1): 1})
    assert line_duality.same_class(line_duality.dot(x_dx, x_dx), SparseVector({(2, 1): 1}))
    assert line_duality.same_class(line_duality.dot(x_dx, SparseVector({(1,): 1})), SparseVector({(2,): 1}))


def test_report_lists_blocks(line_duality):
    report = line_duality.report()
    assert report['nondegenerate']
    assert report['witness'] is None
    assert report['structure']['dimension'] == 1
    assert report['blocks']

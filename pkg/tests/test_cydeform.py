import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cycalc.algebra import catalog
from cycalc.calculus import make_rng, u_series
from cycalc.commutative import hkr_cochain
from cycalc.cydeform import (
    CyclicComparison, DefFlatEquivalence, DeformationDGLA, EpsilonExtension, build_deformation_dgla,
    cohomologous_witness, complete_tangent, cyclic_differential, exp_cochain, forget_failures,
    forget_square_commutes, lie_connes_witness, log_cochain, obstruction_periodic_image,
)
from cycalc.duality import CYStructure, catalog_structure
from cycalc.errors import InconsistentSystem
from cycalc.exactla import SparseVector
from cycalc.mc import gauge, is_mc, random_r_element, tagged
from cycalc.testring import RElement, truncated_polynomial, truncation_extension

E = 1
TRANSLATION = ((0,), (0,))
EULER = ((1,), (0,))


@pytest.fixture(scope='module')
def k2_deformations(k2):
    unit = CYStructure(k2, 0, u_series(SparseVector({(k2.unit,): 1})))
    return DeformationDGLA(unit, u_bound=2)


@pytest.fixture(scope='module')
def k2_phi(k2_deformations):
    return DefFlatEquivalence(k2_deformations)


@pytest.fixture(scope='module')
def line_deformations(qx):
    return DeformationDGLA(catalog_structure(qx), u_bound=3)


@pytest.fixture(scope='module')
def line_psi(line_deformations):
    return CyclicComparison(line_deformations)


def mc_element(D, ring, rng):
    """gauge orbit of 0, hence Maurer-Cartan"""
    return gauge(D, random_r_element(D, ring, rng, 0), RElement(ring))


def test_deformation_dgla_satisfies_the_axioms(k2_deformations, line_deformations):
    assert k2_deformations.structure_failures(make_rng(1), 5) == []
    assert line_deformations.structure_failures(make_rng(2), 4) == []


def test_twist_sits_in_degree_one(k2_deformations, line_deformations):
    for D in (k2_deformations, line_deformations):
        assert {D.degree(key) for key in D.twist} == {1}


def test_build_checks_the_axioms(k2):
    unit = CYStructure(k2, 0, u_series(SparseVector({(k2.unit,): 1})))
    D = build_deformation_dgla(unit, u_bound=1, rng=make_rng(0), samples=3)
    assert D.module.top_degree == 2


def test_module_window_respects_the_lowest_degree(k2_deformations):
    module = k2_deformations.module
    assert module.keys(-2) == []
    assert all(module.degree(key) == 0 for key in module.keys(0))


def test_exp_and_log_are_inverse(k2, ring3):
    rng = make_rng(4)
    D = DeformationDGLA(CYStructure(k2, 0, u_series(SparseVector({(k2.unit,): 1}))), u_bound=1)
    f = random_r_element(D.cochains, ring3, rng, 0)
    assert log_cochain(k2, exp_cochain(k2, f)) == f


@settings(max_examples=8, deadline=None)
@given(st.integers(min_value=0, max_value=1000))
def test_phi_on_objects_round_trips(k2_deformations, k2_phi, seed):
    ring = truncated_polynomial(3)
    y = mc_element(k2_deformations, ring, make_rng(seed))
    obj = k2_phi.on_object(y)
    assert obj.violations() == []
    assert k2_phi.object_preimage(obj) == y


@pytest.mark.parametrize('n', [2, 3, 4])
@pytest.mark.parametrize('seed', range(4))
def test_mc_equation_matches_the_flat_conditions(k2_deformations, k2_phi, n, seed):
    ring = truncated_polynomial(n)
    rng = make_rng(seed)
    closed = RElement(ring, {E: k2_deformations.d(k2_deformations.random_element(rng, 0))})
    generic = random_r_element(k2_deformations, ring, rng, 1)
    for y in (closed, generic):
        assert is_mc(k2_deformations, y) == (k2_phi.on_object(y).violations() == [])
    if n == 2:
        assert is_mc(k2_deformations, closed)


@pytest.mark.parametrize('n', [3, 4])
@pytest.mark.parametrize('seed', range(3))
def test_top_order_perturbations_are_rejected(k2_deformations, k2_phi, n, seed):
    ring = truncated_polynomial(n)
    rng = make_rng(seed)
    y = mc_element(k2_deformations, ring, rng)
    z = next(z for z in (k2_deformations.random_element(rng, 1) for _ in range(20))
             if not k2_deformations.d(z).is_zero())
    candidate = y + RElement(ring, {n - 1: z})
    assert not is_mc(k2_deformations, candidate)
    assert k2_phi.on_object(candidate).violations() != []


@pytest.mark.parametrize('seed', range(3))
def test_phi_on_morphisms_round_trips(k2_deformations, k2_phi, ring3, seed):
    rng = make_rng(seed)
    y = mc_element(k2_deformations, ring3, rng)
    x = random_r_element(k2_deformations, ring3, rng, 0)
    morphism = k2_phi.on_morphism(x, y)
    assert morphism.violations() == []
    assert k2_phi.morphism_preimage(morphism) == x


def test_phi_is_functorial(k2_deformations, k2_phi, ring3):
    rng = make_rng(12)
    y = mc_element(k2_deformations, ring3, rng)
    x1 = random_r_element(k2_deformations, ring3, rng, 0)
    x2 = random_r_element(k2_deformations, ring3, rng, 0)
    assert k2_phi.functoriality_failures(x1, x2, y) == []


def test_morphism_sign_depends_on_the_dimension(k2_phi, line_deformations):
    assert k2_phi.morphism_sign == -1
    assert DefFlatEquivalence(line_deformations).morphism_sign == 1


def test_forgetting_the_chain_part(k2_deformations, k2_phi, ring3):
    rng = make_rng(5)
    assert forget_failures(k2_deformations, rng) == []
    assert forget_square_commutes(k2_phi, mc_element(k2_deformations, ring3, rng))


def test_cohomologous_cycles_give_isomorphic_dglas(t2):
    unit = SparseVector({(0, (0,)): 1})
    D = DeformationDGLA(CYStructure(t2, 0, unit), u_bound=1)
    xi = SparseVector({(0, (2, 1)): 1})
    shifted = unit + cyclic_differential(t2, xi, None)
    assert shifted != unit
    other = DeformationDGLA(CYStructure(t2, 0, shifted), u_bound=1)
    rng = make_rng(3)
    samples = [D.random_element(rng, degree) for degree in (0, 1) for _ in range(4)]
    assert cohomologous_witness(D, other, xi, samples) == []


# --- the comparison with negative cyclic chains -------------------------------------

@pytest.mark.parametrize('degree', [0, 1])
def test_psi_is_a_chain_map(line_deformations, line_psi, degree):
    rng = make_rng(degree)
    for _ in range(4):
        z = line_deformations.random_piece_element(rng, degree, (-1, 0))
        assert line_psi.residual(z).is_zero()


def test_psi_sends_the_translation_to_the_unit(qx, line_psi):
    translation = hkr_cochain(qx, SparseVector({TRANSLATION: 1}), input_bound=3)
    image = line_psi.psi(tagged('g', translation))
    assert set(image) == {(0, (0,))}


def test_psi_is_a_quasi_isomorphism_on_the_line(line_psi):
    report = line_psi.verify_quasi_iso((0, 1), (-1, 0))
    assert report['ok'], report['blocks']
    dims = {(b['degree'], b['piece']): b['source_dim'] for b in report['blocks']}
    assert dims == {(0, -1): 1, (0, 0): 0, (1, -1): 0, (1, 0): 0}
    assert [b['duality_invertible'] for b in report['blocks'] if b['degree'] == 0] == [True, True]


def test_window_degrees_and_pieces(line_psi):
    assert line_psi.window_degrees() == [-1, 0, 1, 2]
    assert line_psi.window_pieces(4) == [-1, 0, 1, 2]
    assert line_psi.window_pieces(1) == [-1, 0]
    assert line_psi.window_pieces(4, closed=True) == [-1, 0]


@pytest.fixture(scope='module')
def wide_line_psi(qx):
    return CyclicComparison(DeformationDGLA(catalog_structure(qx), u_bound=3, lowest_degree=-2, all_shifts=True))


def test_elements_of_the_algebra_sit_in_degree_minus_one(qx, wide_line_psi):
    D = wide_line_psi.D
    assert D.cochains.keys(-1, 0) == [((), qx.unit)]
    assert all(D.degree(key) == -1 for key in D.keys(-1, 0))


def test_psi_is_a_chain_map_in_degree_minus_one(wide_line_psi):
    rng = make_rng(11)
    for _ in range(4):
        z = wide_line_psi.D.random_piece_element(rng, -1, (-1, 0, 1))
        assert wide_line_psi.residual(z).is_zero()


def test_psi_sends_the_unit_to_the_volume_form(wide_line_psi):
    report = wide_line_psi.verify_quasi_iso([-1], [-1, 0])
    assert report['ok'], report['blocks']
    dims = {b['piece']: (b['source_dim'], b['target_dim']) for b in report['blocks']}
    assert dims == {-1: (0, 0), 0: (1, 1)}


@pytest.mark.parametrize('field', [TRANSLATION, EULER])
def test_lie_derivative_is_connes_up_to_a_boundary(qx, line_psi, field):
    mu = hkr_cochain(qx, SparseVector({field: 1}), input_bound=3)
    eta = u_series(SparseVector({(1, 1): 1}))
    _, defect = lie_connes_witness(line_psi.assignment, mu, eta, upper=3)
    assert defect.is_zero()


def test_tangent_vectors_complete_only_when_divergence_free(qxy):
    D = DeformationDGLA(catalog_structure(qxy), u_bound=2)
    poisson = hkr_cochain(qxy, SparseVector({((0, 0), (0, 1)): 1}), input_bound=2)
    y = complete_tangent(D, poisson, -2)
    assert D.d(y).is_zero()
    rotating = hkr_cochain(qxy, SparseVector({((1, 0), (0, 1)): 1}), input_bound=2)
    with pytest.raises(InconsistentSystem):
        complete_tangent(D, rotating, -1)


@pytest.fixture(scope='module')
def extension(line_psi):
    return EpsilonExtension(line_psi)


def extension_samples(D):
    samples = []
    for degree in (0, 1):
        for piece in (-1, 0):
            for key in D.cochains.keys(degree, piece):
                for j in (0, 1):
                    samples.append(SparseVector({('g', (key, j)): 1}))
                    samples.append(SparseVector({('e', (key, j)): 1}))
    return samples


def test_extension_is_a_complex(line_deformations, extension):
    assert extension.square_failures(extension_samples(line_deformations)) == []


def test_extended_psi_is_a_chain_map(line_deformations, extension):
    for z in extension_samples(line_deformations):
        assert extension.residual(z).is_zero()


def test_epsilon_terms_cancel(line_deformations, extension):
    for key in line_deformations.cochains.keys(1, 0):
        assert extension.psi(extension.d(SparseVector({('e', (key, 0)): 1}))).is_zero()


def test_extension_restricts_to_psi(line_deformations, extension):
    rng = make_rng(2)
    samples = [line_deformations.random_piece_element(rng, degree, (-1, 0)) for degree in (0, 1)]
    assert extension.restriction_failures(samples) == []
    assert extension.degree(('e', (((1,), 0), 0))) == 1


@pytest.fixture(scope='module')
def space_deformations():
    return DeformationDGLA(catalog_structure(catalog('Q[x,y,z]', weight_bound=3)), u_bound=2)


def test_obstruction_of_a_volume_preserving_bivector(space_deformations):
    """z d/dx^d/dy + x d/dy^d/dz is divergence free, yet its Hochschild square is not zero"""
    D = space_deformations
    bivector = SparseVector({((0, 0, 1), (0, 1)): 1, ((1, 0, 0), (1, 2)): 1})
    t = complete_tangent(D, hkr_cochain(D.algebra, bivector, input_bound=3), -1)
    classes = D.cohomology_class(t, 1)
    assert any(not c.is_zero() for c in classes.values())
    ext = truncation_extension(2)
    x = RElement(ext.target, {E: t})
    assert is_mc(D, x)
    result = obstruction_periodic_image(CyclicComparison(D), x, ext)
    assert any(tag == 'g' for tag, _ in result.cocycle)
    assert result.is_zero
    assert result.to_json()['zero']


def test_bracket_matches_the_string_formula_on_the_plane(qxy):
    comparison = CyclicComparison(DeformationDGLA(catalog_structure(qxy), u_bound=2))
    pieces = comparison.window_pieces(3, closed=True)
    assert pieces == [-2, -1, 0]
    report = comparison.compare_brackets([(0, piece) for piece in pieces])
    assert report['consistent'], report['pairs']
    assert report['sign'] in (1, -1)
    nonzero = [pair['relation'] for pair in report['pairs'] if pair['relation'] != 0]
    assert nonzero
    assert set(nonzero) == {report['sign']}

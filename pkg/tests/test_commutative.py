import pytest

from cycalc.calculus import hoch_b, make_rng
from cycalc.commutative import (
    BVMinus, PolyCalculus, VolumeForm, catalog_eta, comparison_dglas, delta_prime, hkr_chain, hkr_cochain,
    verify_hkr, volume_form,
)
from cycalc.errors import ConfigError
from cycalc.exactla import SparseVector
from cycalc.mc import morphism_failures
from cycalc.signs import sign

D = ((0,), (0,))          # d/dx
EULER = ((1,), (0,))      # x d/dx


@pytest.fixture(scope='module')
def line():
    return PolyCalculus(1)


@pytest.fixture(scope='module')
def plane():
    return PolyCalculus(2)


@pytest.fixture(scope='module')
def space():
    return PolyCalculus(3)


def test_schouten_of_translation_and_euler(line):
    assert line.schouten(SparseVector({D: 1}), SparseVector({EULER: 1})) == SparseVector({D: 1})
    assert line.schouten(SparseVector({EULER: 1}), SparseVector({D: 1})) == SparseVector({D: -1})


def test_vector_field_on_function(line):
    x = SparseVector({((1,), ()): 1})
    assert line.schouten(SparseVector({D: 1}), x) == SparseVector({((0,), ()): 1})


def test_wedge_of_vector_fields_anticommutes(plane):
    dx = SparseVector({((0, 0), (0,)): 1})
    dy = SparseVector({((0, 0), (1,)): 1})
    assert plane.wedge(dx, dy) == SparseVector({((0, 0), (0, 1)): 1})
    assert plane.wedge(dy, dx) == SparseVector({((0, 0), (0, 1)): -1})
    assert plane.wedge(dx, dx).is_zero()


def test_contraction_by_single_vector_fields(plane):
    top = SparseVector({((0, 0), (0, 1)): 1})
    dx = SparseVector({((0, 0), (0,)): 1})
    dy = SparseVector({((0, 0), (1,)): 1})
    assert plane.contract(dx, top) == SparseVector({((0, 0), (1,)): 1})
    assert plane.contract(dy, top) == SparseVector({((0, 0), (0,)): -1})
    assert plane.contract(dx, SparseVector({((0, 0), (0,)): 1})) == SparseVector({((0, 0), ()): 1})


@pytest.mark.parametrize('seed', range(5))
def test_contraction_by_wedge_composes(space, seed):
    rng = make_rng(seed)
    p = space.random_element(rng, 1, max_degree=1)
    q = space.random_element(rng, 1, max_degree=1)
    omega = space.random_element(rng, 3, max_degree=1)
    assert space.contract(space.wedge(p, q), omega) == space.contract(p, space.contract(q, omega))


@pytest.mark.parametrize('degree', [0, 1, 2])
def test_de_rham_squares_to_zero(space, degree):
    rng = make_rng(degree)
    omega = space.random_element(rng, degree, max_degree=3, terms=5)
    assert space.de_rham(space.de_rham(omega)).is_zero()


@pytest.mark.parametrize('seed', range(4))
def test_schouten_antisymmetry_and_jacobi(plane, seed):
    rng = make_rng(seed)
    degrees = [rng.choice((0, 1, 2)) for _ in range(3)]
    p, q, r = (plane.random_element(rng, d, max_degree=1) for d in degrees)
    a, b, _ = (d - 1 for d in degrees)
    assert plane.schouten(p, q) == plane.schouten(q, p).scaled(-sign(a * b))
    left = plane.schouten(p, plane.schouten(q, r))
    right = plane.schouten(plane.schouten(p, q), r) + plane.schouten(q, plane.schouten(p, r)).scaled(sign(a * b))
    assert left == right


def test_divergence_of_euler_fields(line, plane):
    assert VolumeForm.standard(line).divergence(SparseVector({EULER: 1})) == SparseVector({((0,), ()): 1})
    assert VolumeForm.standard(line).divergence(SparseVector({D: 1})).is_zero()
    euler = SparseVector({((1, 0), (0,)): 1, ((0, 1), (1,)): 1})
    assert VolumeForm.standard(plane).divergence(euler) == SparseVector({((0, 0), ()): 2})


def test_density_must_not_vanish_at_origin(line):
    with pytest.raises(ConfigError):
        VolumeForm(line, {(1,): 1})


def test_inverse_density(line):
    volume = VolumeForm(line, {(0,): 1, (1,): 1})
    assert volume.inverse == {(k,): sign(k) for k in range(line.cutoff + 1)}


@pytest.mark.parametrize('density', [{(0, 0): 1}, {(0, 0): 2, (1, 0): 1}])
def test_divergence_squares_to_zero(plane, density):
    volume = VolumeForm(plane, density)
    rng = make_rng(3)
    for p in (1, 2):
        gamma = plane.random_element(rng, p, max_degree=2, terms=4)
        twice = volume.divergence(volume.divergence(gamma))
        assert plane.truncated(twice, volume.exact_degree(2)).is_zero()


@pytest.mark.parametrize('density', [{(0, 0): 1}, {(0, 0): 1, (1, 0): 1}, {(0, 0): 1, (1, 1): 3}])
@pytest.mark.parametrize('seed', range(3))
def test_divergence_generates_schouten_bracket(plane, density, seed):
    volume = VolumeForm(plane, density)
    rng = make_rng(seed)
    for p in (0, 1, 2):
        for q in (0, 1, 2):
            g1 = plane.random_element(rng, p, max_degree=2)
            g2 = plane.random_element(rng, q, max_degree=2)
            assert volume.schechtman_defect(g1, g2).is_zero()


def test_hkr_of_volume_form(q, qxy):
    assert catalog_eta(q) == SparseVector({(0, (0,)): 1})
    eta = hkr_chain(qxy, volume_form(qxy))
    assert eta == SparseVector({(0, 1, 2): 1, (0, 2, 1): -1})
    assert hoch_b(qxy, eta).is_zero()


def test_hkr_of_translation(qx):
    cochain = hkr_cochain(qx, SparseVector({D: 1}), input_bound=3)
    assert cochain == SparseVector({((1,), 0): 1, ((2,), 1): 2, ((3,), 2): 3})


def test_hkr_matches_hochschild_blocks(qx, qxy):
    for algebra in (qx, qxy):
        report = verify_hkr(algebra)
        assert report['ok'], [b for b in report['blocks'] if not b['ok']]


def test_hkr_needs_a_polynomial_algebra(k2):
    with pytest.raises(ConfigError):
        verify_hkr(k2)


@pytest.fixture(scope='module')
def bv(plane):
    return BVMinus(VolumeForm.standard(plane), u_bound=3)


@pytest.mark.parametrize('seed', range(4))
def test_bv_bracket_is_generated_by_d(bv, seed):
    rng = make_rng(seed)
    g = bv.random_element(rng, rng.choice((1, 2, 3)))
    h = bv.random_element(rng, rng.choice((1, 2, 3)))
    assert bv.bracket_defect(g, h).is_zero()
    assert bv.commutativity_defect(g, h).is_zero()


@pytest.mark.parametrize('seed', range(4))
def test_bv_bracket_is_a_derivation_of_the_product(bv, seed):
    rng = make_rng(seed)
    g, h1, h2 = (bv.random_element(rng, rng.choice((1, 2))) for _ in range(3))
    assert bv.leibniz_defect(g, h1, h2).is_zero()


def test_bv_is_a_dgla(bv):
    assert bv.structure_failures(make_rng(1), 6, degrees=(1, 2, 3)) == []


def test_delta_prime_of_u_translation(line):
    volume = VolumeForm.standard(line)
    image = delta_prime(volume, SparseVector({('a', (1, (0,), (0,))): 1}))
    assert image == SparseVector({('m', (0, (0,), ())): 1})


@pytest.mark.parametrize('density', [{(0, 0): 1}, {(0, 0): 3}])
def test_delta_prime_is_a_dgla_morphism(plane, density):
    source, target, f = comparison_dglas(VolumeForm(plane, density), u_bound=3)
    rng = make_rng(11)
    assert morphism_failures(source, target, f, rng, samples=12) == []
    for degree in (0, 1):
        x = source.random_element(rng, degree)
        assert source.d(source.d(x)).is_zero()
        assert target.d(target.d(f(x))).is_zero()

"""Calculus Engine - Deformations of Calabi-Yau Pairs

The DGLA D = C(A) ⋉ Σ^{-d-1} CC^-(A) twisted by (0, eta_0), the
equivalence Phi from its Maurer-Cartan groupoid to flat deformations of
(A, eta_0), and the comparison Psi: D -> Σ^{-d+1} CC^-(A).

Module elements are stored unshifted: the key (p, t) stands for u^p t, the
module degree of a chain of homological degree k is d + 1 - k, and with
r = -d - 1 the action is (-1)^{r|x|} L_x and the differential is
(-1)^r (b + uB).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from .calculus import (
    ChainWindow, CochainWindow, cochain_degree, connes_B, hoch_b, identity_cochain, lie_L, mu_cochain, op_i,
    random_cochain, u_coefficient, u_series, u_shift,
)
from .constants import DEFAULT_U_BOUND
from .cyclic import NEGATIVE, CyclicWindow, pi, to_periodic
from .duality import Duality
from .errors import ConfigError, NotACycle, NotAChainMap, NotAComplex, TruncationExceeded
from .exactla import (
    IndexedBasis, LinearMap, SparseVector, homology, induced_on_homology, solve_strict, vector_to_json,
)
from .homotopy import SAssignment
from .mc import (
    CochainDGLA, DefFlatMorphism, DefFlatObject, Module, SemidirectDGLA, TwistedDGLA, bch, defflat_compose,
    gauge, morphism_failures, normal_form, obstruction_cocycle, part, r_compose, tagged,
)
from .signs import sign
from .testring import RElement


def _on_chains(series, func):
    """Apply a chain operator to every u-coefficient"""
    result = SparseVector()
    for (p, t), c in series.items():
        for t2, v in func(SparseVector({t: 1})).items():
            result.add_term((p, t2), c * v)
    return result


def cyclic_differential(algebra, series, upper):
    """(b + uB) on a u-series, powers above `upper` dropped"""
    result = _on_chains(series, lambda chain: hoch_b(algebra, chain))
    result += u_shift(_on_chains(series, lambda chain: connes_B(algebra, chain)), 1, upper=upper)
    return result


class CyclicChainModule(Module):
    """Σ^{-d-1} CC^-(A) as a DG-module over the normalized cochains.

    Keeps 0 <= p <= U, chains of homological degree at most d + 1 - lowest
    and, for graded algebras, chains of weight <= W. Pieces are chain
    weights relative to eta_0.
    """

    def __init__(self, algebra, dimension, base_weight, u_bound=DEFAULT_U_BOUND, lowest_degree=-1,
                 weight_bound=None):
        self.algebra = algebra
        self.dimension = dimension
        self.shift = -dimension - 1
        self.base_weight = base_weight
        self.u_bound = u_bound
        self.lowest_degree = lowest_degree
        self.top_degree = dimension + 1 - lowest_degree
        self.max_arity = self.top_degree + 2 * u_bound
        self.weight_bound = (algebra.max_weight if weight_bound is None else weight_bound) \
            if algebra.is_graded else None
        self.name = f"CC-({algebra.name})[{self.shift}]"
        self._keys = {}

    def degree(self, key):
        p, t = key
        return self.dimension + 2 - len(t) + 2 * p

    def contains(self, key):
        p, t = key
        if not 0 <= p <= self.u_bound:
            return False
        if len(t) - 1 - 2 * p > self.top_degree:
            return False
        if self.weight_bound is not None and self.algebra.tensor_weight(t) > self.weight_bound:
            return False
        return True

    def _clean(self, series):
        return SparseVector((k, c) for k, c in series.items() if self.contains(k))

    def act_basis(self, gkey, mkey):
        p, t = mkey
        image = lie_L(self.algebra, SparseVector({gkey: 1}), SparseVector({t: 1}))
        s = sign(self.shift * cochain_degree(gkey))
        return self._clean(SparseVector(((p, t2), s * c) for t2, c in image.items()))

    def d_basis(self, key):
        image = cyclic_differential(self.algebra, SparseVector({key: 1}), self.u_bound)
        return self._clean(image).scaled(sign(self.shift))

    def weights(self):
        if self.weight_bound is not None:
            return list(range(self.weight_bound + 1))
        return list(range(max(self.algebra.weights) * (self.max_arity + 1) + 1))

    def pieces(self, degree):
        return [w - self.base_weight for w in self.weights()]

    def keys(self, degree, piece=None):
        if piece is None:
            keys = []
            for label in self.pieces(degree):
                keys.extend(self.keys(degree, label))
            return keys
        cache_key = (degree, piece)
        if cache_key not in self._keys:
            hom = self.dimension + 1 - degree
            weight = self.base_weight + piece
            keys = []
            if hom <= self.top_degree and 0 <= weight and (self.weight_bound is None or weight <= self.weight_bound):
                for p in range(self.u_bound + 1):
                    n = hom + 2 * p
                    if n < 0 or (self.weight_bound is not None and n > weight):
                        continue
                    keys.extend((p, t) for t in self.algebra.tensor_basis(n, weight))
            self._keys[cache_key] = sorted(keys)
        return self._keys[cache_key]


class DeformationDGLA(TwistedDGLA):
    """C(A) ⋉ Σ^{-d-1} CC^-(A) twisted by the Maurer-Cartan element (0, eta_0).

    all_shifts keeps the positive weight shifts of graded algebras, for
    comparisons that only need the differential.
    """

    def __init__(self, structure, u_bound=DEFAULT_U_BOUND, lowest_degree=-1, weight_bound=None, all_shifts=False):
        structure.check_cycle()
        A = structure.algebra
        module = CyclicChainModule(A, structure.dimension, structure.weight, u_bound, lowest_degree, weight_bound)
        if A.is_graded:
            window = CochainWindow(A, weight_bound=module.weight_bound)
        else:
            window = CochainWindow(A, arity_bound=module.max_arity + 1)
        cochains = CochainDGLA(A, window, all_shifts=all_shifts)
        semidirect = SemidirectDGLA(cochains, module, name=f"C({A.name})⋉{module.name}")
        eta0 = SparseVector((k, c) for k, c in structure.eta_chain.items() if k[0] <= u_bound)
        super().__init__(semidirect, tagged('m', eta0))
        self.structure = structure
        self.algebra = A
        self.dimension = structure.dimension
        self.shift = module.shift
        self.u_bound = u_bound
        self.eta0 = eta0
        self.cochains = cochains
        self.module = module
        self.semidirect = semidirect
        self.weight_bound = module.weight_bound
        self.name = f"D({A.name})"
        logging.info(f"built {self.name}: d={self.dimension}, U={u_bound}, "
                     f"homological degrees <= {module.top_degree}")

    @property
    def base_weight(self):
        return self.module.base_weight

    @property
    def input_bound(self):
        return self.cochains.input_bound

    def random_piece_element(self, rng, degree, pieces, terms=3):
        """Random element supported on the given pieces"""
        keys = []
        for piece in pieces:
            keys.extend(self.keys(degree, piece))
        return random_cochain(rng, keys, terms)


def build_deformation_dgla(structure, u_bound=DEFAULT_U_BOUND, lowest_degree=-1, weight_bound=None, rng=None,
                           samples=0):
    """DeformationDGLA, with sampled DGLA axioms checked when rng is given"""
    D = DeformationDGLA(structure, u_bound, lowest_degree, weight_bound)
    if rng is not None and samples:
        failures = D.structure_failures(rng, samples)
        if failures:
            raise NotAComplex(f"{D.name} fails {failures}")
    return D


# --- the equivalence Phi -----------------------------------------------------------

def exp_cochain(algebra, f):
    """e^f = sum f^n / n! for an arity-1 cochain f over R with coefficients in m"""
    ring = f.ring
    identity = RElement.constant(ring, identity_cochain(algebra))
    total = identity
    term = identity
    for n in range(1, max(ring.nil_order, 1) + 1):
        term = r_compose(algebra, f, term).scaled(Fraction(1, n))
        if term.is_zero():
            return total
        total = total + term
    raise ConfigError("f is not nilpotent on the test ring")


def log_cochain(algebra, phi):
    """log phi = sum (-1)^{n+1} (phi - id)^n / n for phi congruent to id"""
    ring = phi.ring
    g = phi - RElement.constant(ring, identity_cochain(algebra))
    if not g.in_ideal():
        raise ConfigError("phi is not congruent to the identity")
    total = RElement(ring)
    power = g
    for n in range(1, max(ring.nil_order, 1) + 1):
        if power.is_zero():
            return total
        total = total + power.scaled(Fraction(sign(n + 1), n))
        power = r_compose(algebra, g, power)
    if not power.is_zero():
        raise ConfigError("phi - id is not nilpotent on the test ring")
    return total


class DefFlatEquivalence:
    """Phi: MC(D (x) m) -> Def-flat(A, eta_0) and its inverse.

    On objects (mu, eta) |-> (mu_0 + mu, eta_0 + eta). A gauge element
    exp(0, xi) exp(f, 0) goes to (e^f, (-1)^{d+1} xi).
    """

    def __init__(self, D):
        self.D = D
        self.algebra = D.algebra
        self.mu0 = mu_cochain(D.algebra)
        self.morphism_sign = sign(D.dimension + 1)

    def on_object(self, y):
        ring = y.ring
        if not y.in_ideal():
            raise ConfigError("Maurer-Cartan elements of D (x) m have coefficients in m")
        mu = RElement.constant(ring, self.mu0) + y.map(lambda v: part('g', v))
        eta = RElement.constant(ring, self.D.eta0) + y.map(lambda v: part('m', v))
        return DefFlatObject(self.algebra, mu, eta, self.D.eta0, u_bound=self.D.u_bound,
                             input_bound=self.D.input_bound)

    def object_preimage(self, obj):
        """(mu - mu_0, eta - eta_0) as an element of D (x) m"""
        ring = obj.ring
        deformation = obj.mu - RElement.constant(ring, self.mu0)
        correction = obj.eta - RElement.constant(ring, self.D.eta0)
        if not (deformation.in_ideal() and correction.in_ideal()):
            raise ConfigError("object does not reduce to (mu_0, eta_0)")
        return deformation.map(lambda v: tagged('g', v)) + correction.map(lambda v: tagged('m', v))

    def on_morphism(self, x, y):
        """The morphism Phi(y) -> Phi(x . y) of a gauge element x"""
        form = normal_form(self.D, x)
        phi = exp_cochain(self.algebra, form.f.map(lambda v: part('g', v)))
        xi = form.xi.map(lambda v: part('m', v)).scaled(self.morphism_sign)
        return DefFlatMorphism(self.on_object(y), self.on_object(gauge(self.D, x, y)), phi, xi)

    def morphism_preimage(self, morphism):
        """bch((0, (-1)^{d+1} xi), (log phi, 0))"""
        f = log_cochain(self.algebra, morphism.phi).map(lambda v: tagged('g', v))
        xi = morphism.xi.scaled(self.morphism_sign).map(lambda v: tagged('m', v))
        return bch(self.D, xi, f)

    def functoriality_failures(self, x1, x2, y):
        """Phi(x1 x2) against Phi(x1) o Phi(x2), as a list of differing fields"""
        direct = self.on_morphism(bch(self.D, x1, x2), y)
        second = self.on_morphism(x2, y)
        first = self.on_morphism(x1, gauge(self.D, x2, y))
        composite = defflat_compose(first, second)
        failures = []
        if composite.phi != direct.phi:
            failures.append('phi')
        if composite.xi != direct.xi:
            failures.append('xi')
        return failures


def forget(x):
    """D -> C(A): (mu, eta) |-> mu"""
    return part('g', x)


def forget_failures(D, rng, samples=6):
    """Sampled DGLA-morphism checks of the forgetful map"""
    return morphism_failures(D, D.cochains, forget, rng, samples)


def forget_square_commutes(equivalence, y):
    """Phi_{Def A}(forget(y)) is the multiplication part of Phi(y)"""
    ring = y.ring
    via_cochains = RElement.constant(ring, equivalence.mu0) + y.map(forget)
    return via_cochains == equivalence.on_object(y).mu


def cohomologous_witness(D, other, xi, samples):
    """e^{ad(0, s xi)} intertwines the twisted differentials of D and `other`.

    `other` is built from eta_0' = eta_0 + (b + uB) xi with the same window.
    Returns the samples on which the two sides differ, or raises NotAComplex
    when eta_0' is not the expected shift of eta_0.
    """
    m = tagged('m', xi.scaled(sign(D.shift)))
    moved = other.twist - tagged('m', D.module.d(part('m', m)))
    if moved != D.twist:
        raise NotAComplex("eta_0' - (b + uB) xi is not eta_0")
    base = D.semidirect

    def transport(z):
        return z + base.bracket(m, z)
    return [z for z in samples if transport(other.d(z)) != D.d(transport(z))]


# --- the comparison Psi ------------------------------------------------------------

@dataclass
class QuasiIsoBlock:
    """Psi on one (degree, piece) block of cohomology"""
    degree: int
    piece: int
    source_dim: int
    target_dim: int
    rank: int
    duality_invertible: bool = None

    @property
    def invertible(self):
        return self.source_dim == self.target_dim == self.rank

    def to_json(self):
        return {
            'degree': self.degree,
            'piece': self.piece,
            'source_dim': self.source_dim,
            'target_dim': self.target_dim,
            'rank': self.rank,
            'invertible': self.invertible,
            'duality_invertible': self.duality_invertible,
        }


class CyclicComparison:
    """Psi(mu, eta) = (-1)^{d(|mu|+1)} I_mu eta_0 + u eta, into Σ^{-d+1} CC^-.

    The target carries the differential (-1)^r (b + uB); a class of D-degree
    e lands in homological degree d - 1 - e. Powers of u above U are dropped.
    """

    def __init__(self, D, assignment=None):
        self.D = D
        self.algebra = D.algebra
        self.dimension = D.dimension
        self.target = CyclicWindow(D.algebra, NEGATIVE, u_bound=D.u_bound,
                                   chain_window=ChainWindow(D.algebra, weight_bound=D.weight_bound))
        self.assignment = assignment or SAssignment(D.algebra, chain_window=self.target.chains)
        self._images = {}
        self._induced = {}
        self._homology = {}
        self._duality = None

    def cochain_sign(self, key):
        return sign(self.dimension * (cochain_degree(key) + 1))

    def contraction_image(self, key):
        """(-1)^{d(|mu|+1)} I_mu eta_0 for a basis cochain"""
        I = self.assignment.I(SparseVector({key: 1}), upper=self.D.u_bound)
        return I(self.D.eta0).scaled(self.cochain_sign(key))

    def psi_basis(self, key):
        if key not in self._images:
            tag, k = key
            if tag == 'g':
                self._images[key] = self.contraction_image(k)
            else:
                self._images[key] = u_shift(SparseVector({k: 1}), 1, upper=self.D.u_bound)
        return self._images[key]

    def psi(self, z):
        result = SparseVector()
        for key, coef in z.items():
            result.iadd_coef(coef, self.psi_basis(key))
        return result

    def target_d(self, series):
        return cyclic_differential(self.algebra, series, self.D.u_bound).scaled(sign(self.D.shift))

    def residual(self, z):
        """Psi(d z) - d Psi(z)"""
        return self.psi(self.D.d(z)) - self.target_d(self.psi(z))

    def target_degree(self, degree):
        return self.dimension - 1 - degree

    def target_weight(self, piece):
        return self.D.base_weight + piece

    def window_degrees(self):
        """D-degrees -1 .. d + 1, i.e. HC^-_d down to HC^-_{-2}"""
        return list(range(-1, self.dimension + 2))

    def window_pieces(self, max_weight, closed=False):
        """Pieces whose target weight lies in 0 .. max_weight.

        With closed only the pieces of the bracket-closed window, where the
        cochain part has weight shift <= 0.
        """
        bound = max_weight if self.D.weight_bound is None else min(max_weight, self.D.weight_bound)
        pieces = [w - self.D.base_weight for w in range(bound + 1)]
        return [p for p in pieces if p <= 0] if closed else pieces

    # cohomology blocks

    def _source_complex(self, degree, piece):
        D = self.D
        bases = [IndexedBasis(D.keys(e, piece)) for e in (degree - 1, degree, degree + 1)]
        d_in = LinearMap.from_function(bases[0], bases[1], D.d_basis, strict=False)
        d_out = LinearMap.from_function(bases[1], bases[2], D.d_basis, strict=False)
        return bases, (d_in, d_out)

    def _target_complex(self, degree, piece):
        k = self.target_degree(degree)
        w = self.target_weight(piece)
        s = sign(self.D.shift)
        bases = [self.target.basis(k - j, w) for j in (-1, 0, 1)]
        return bases, (self.target.matrix(k + 1, w).scaled(s), self.target.matrix(k, w).scaled(s))

    def _psi_matrix(self, source, target):
        return LinearMap.from_function(source, target, self.psi_basis, strict=False)

    def induced(self, degree, piece, squares=True):
        """Psi on cohomology at (degree, piece).

        With squares the chain-map squares against the neighbouring degrees
        are checked entrywise; without, only cycles and boundaries of this
        degree are pushed forward, which needs S on this degree alone.
        """
        key = (degree, piece, squares)
        if key not in self._induced:
            s_bases, source = self._source_complex(degree, piece)
            t_bases, target = self._target_complex(degree, piece)
            f = self._psi_matrix(s_bases[1], t_bases[1])
            neighbours = {}
            if squares:
                neighbours = {'f_prev': self._psi_matrix(s_bases[0], t_bases[0]),
                              'f_next': self._psi_matrix(s_bases[2], t_bases[2])}
            self._induced[key] = induced_on_homology(f, source, target, **neighbours)
        return self._induced[key]

    def _homologies(self, degree, piece):
        key = (degree, piece)
        if key not in self._homology:
            s_bases, source = self._source_complex(degree, piece)
            t_bases, target = self._target_complex(degree, piece)
            self._homology[key] = (homology(*source), s_bases[1], homology(*target), t_bases[1])
        return self._homology[key]

    def block(self, degree, piece):
        induced = self.induced(degree, piece)
        result = QuasiIsoBlock(degree, piece, induced.domain_dim, induced.codomain_dim, induced.rank())
        result.duality_invertible = self._duality_block_invertible(degree, piece)
        return result

    def _duality_block_invertible(self, degree, piece):
        """Cap with pi(eta_0) on HH^{degree+1}, the quotient side of Psi"""
        if not 0 <= degree + 1 <= self.dimension:
            return None
        try:
            return self.duality.block(degree + 1, piece).invertible
        except (ConfigError, TruncationExceeded):
            return None

    def verify_quasi_iso(self, degrees, pieces):
        """Psi on H^e for each (degree, piece); a failing block is reported, not raised"""
        blocks = []
        for degree in degrees:
            for piece in pieces:
                try:
                    blocks.append(self.block(degree, piece).to_json())
                except NotAChainMap as exc:
                    logging.error(f"Psi is not a chain map at degree {degree}, piece {piece}: {exc}")
                    blocks.append({'degree': degree, 'piece': piece, 'invertible': False, 'error': str(exc)})
        ok = all(b['invertible'] for b in blocks)
        logging.info(f"Psi on {self.D.name}: {len(blocks)} blocks, quasi-isomorphism={ok}")
        return {'algebra': self.algebra.name, 'dimension': self.dimension, 'u_bound': self.D.u_bound,
                'blocks': blocks, 'ok': ok}

    # transported bracket against the string-topology formula

    @property
    def duality(self):
        if self._duality is None:
            self._duality = Duality(self.D.structure, weight_bound=self.D.weight_bound)
        return self._duality

    def target_classes(self, degree, piece):
        """Representatives of the target homology at (degree, piece), as u-series"""
        _, _, target_h, t_mid = self._homologies(degree, piece)
        return [t_mid.to_keys(z) for z in target_h.representatives]

    def target_coordinates(self, series, degree, piece):
        _, _, target_h, t_mid = self._homologies(degree, piece)
        return target_h.coordinates(t_mid.to_indices(series))

    def source_representative(self, series, degree, piece):
        """A cocycle of D whose image under Psi is cohomologous to `series`"""
        source_h, s_mid, _, _ = self._homologies(degree, piece)
        induced = self.induced(degree, piece, squares=False)
        coordinates = induced.inverse().apply(self.target_coordinates(series, degree, piece))
        vec = SparseVector()
        for k, c in coordinates.items():
            vec.iadd_coef(c, source_h.representatives[k])
        return s_mid.to_keys(vec)

    def transported_bracket(self, a, b):
        """Psi [Psi^{-1} a, Psi^{-1} b]; a and b are (series, degree, piece)"""
        x = self.source_representative(*a)
        y = self.source_representative(*b)
        return self.psi(self.D.bracket(x, y))

    def string_bracket(self, a, b):
        """(-1)^{|a| + d} B(pi(a) . pi(b)) with . the product transported by duality"""
        first, second = pi(a[0]), pi(b[0])
        if first.is_zero() or second.is_zero():
            return SparseVector()
        degree = self.target_degree(a[1])
        product = self.duality.dot(first, second)
        return u_series(connes_B(self.algebra, product)).scaled(sign(degree + self.dimension))

    def compare_brackets(self, blocks):
        """Coordinates of both brackets on every pair of basis classes.

        `blocks` lists (degree, piece) pairs; the report names the single
        global sign relating the two, or None when they are not proportional
        by one sign.
        """
        signs = set()
        pairs = []
        for i, (e1, p1) in enumerate(blocks):
            for e2, p2 in blocks[i:]:
                for a in self.target_classes(e1, p1):
                    for b in self.target_classes(e2, p2):
                        left = self.transported_bracket((a, e1, p1), (b, e2, p2))
                        right = self.string_bracket((a, e1, p1), (b, e2, p2))
                        lc = self.target_coordinates(left, e1 + e2, p1 + p2)
                        rc = self.target_coordinates(right, e1 + e2, p1 + p2)
                        if lc.is_zero() and rc.is_zero():
                            relation = 0
                        elif lc == rc:
                            relation = 1
                        elif lc == rc.scaled(-1):
                            relation = -1
                        else:
                            relation = None
                        if relation != 0:
                            signs.add(relation)
                        pairs.append({'blocks': [[e1, p1], [e2, p2]], 'transported': vector_to_json(lc),
                                      'formula': vector_to_json(rc), 'relation': relation})
        consistent = None not in signs and len(signs) <= 1
        global_sign = signs.pop() if consistent and signs else None
        logging.info(f"bracket comparison on {self.algebra.name}: {len(pairs)} pairs, sign {global_sign}")
        return {'pairs': pairs, 'consistent': consistent, 'sign': global_sign,
                'matches_formula_sign': global_sign == 1}


def lie_connes_witness(assignment, mu, eta, upper):
    """u^{-1}(I_mu eta - i_mu pi(eta)) for a Hochschild cocycle mu and a (b + uB)-cycle eta.

    Returns (witness, defect) where defect = (b + uB) witness - (L_mu eta - B i_mu pi(eta)),
    both with powers of u above `upper` dropped.
    """
    A = assignment.algebra
    I = assignment.I(mu, upper=upper + 1)
    contracted = op_i(A, mu)(pi(eta))
    difference = I(eta) - u_series(contracted)
    if not u_coefficient(difference, 0).is_zero():
        raise NotACycle("I_mu eta and i_mu pi(eta) differ at u^0")
    witness = u_shift(difference, -1)
    lhs = cyclic_differential(A, witness, upper)
    lie = _on_chains(eta, lambda chain: lie_L(A, mu, chain))
    rhs = lie - u_series(connes_B(A, contracted))
    rhs = SparseVector((k, c) for k, c in rhs.items() if k[0] <= upper)
    return witness, lhs - rhs


# --- the epsilon extension and obstructions -----------------------------------------

class EpsilonExtension:
    """D[[u]] ⊕ eps D[[u]] ⊕ Σ^{-d-1} CC^- with d(eps s) = -eps ds + u s.

    Keys ('g', (s, j)) for u^j s, ('e', (s, j)) for u^j eps s and
    ('m', k) for module elements. Psi' sends u^j s to u^j Psi(s), eps s to 0
    and module elements to u times themselves.
    """

    def __init__(self, comparison):
        self.comparison = comparison
        self.D = comparison.D
        self.u_bound = self.D.u_bound

    def degree(self, key):
        tag, k = key
        if tag == 'm':
            return self.D.module.degree(k)
        s, j = k
        return cochain_degree(s) + 2 * j + (1 if tag == 'e' else 0)

    def include(self, z):
        """D -> extension"""
        return SparseVector(((('g', (k, 0)) if t == 'g' else ('m', k)), c) for (t, k), c in z.items())

    def _lift_cochain_image(self, image, j):
        result = SparseVector()
        for (t, k), c in image.items():
            if t == 'g':
                result.add_term(('g', (k, j)), c)
            else:
                p, chain = k
                if p + j <= self.u_bound:
                    result.add_term(('m', (p + j, chain)), c)
        return result

    def d_basis(self, key):
        tag, k = key
        if tag == 'm':
            return self.D.d_basis(('m', k))
        s, j = k
        if tag == 'g':
            return self._lift_cochain_image(self.D.d_basis(('g', s)), j)
        result = SparseVector()
        for t, c in self.D.cochains.d_basis(s).items():
            result.add_term(('e', (t, j)), -c)
        if j + 1 <= self.u_bound:
            result.add_term(('g', (s, j + 1)), 1)
        twist = u_shift(self.comparison.contraction_image(s), j, upper=self.u_bound)
        for chain_key, c in twist.items():
            result.add_term(('m', chain_key), -c)
        return result

    def d(self, z):
        result = SparseVector()
        for key, coef in z.items():
            result.iadd_coef(coef, self.d_basis(key))
        return result

    def psi_basis(self, key):
        tag, k = key
        if tag == 'm':
            return self.comparison.psi_basis(('m', k))
        if tag == 'e':
            return SparseVector()
        s, j = k
        return u_shift(self.comparison.psi_basis(('g', s)), j, upper=self.u_bound)

    def psi(self, z):
        result = SparseVector()
        for key, coef in z.items():
            result.iadd_coef(coef, self.psi_basis(key))
        return result

    def residual(self, z):
        """Psi'(d z) - d Psi'(z)"""
        return self.psi(self.d(z)) - self.comparison.target_d(self.psi(z))

    def square_failures(self, samples):
        return [z for z in samples if not self.d(self.d(z)).is_zero()]

    def restriction_failures(self, samples):
        """Psi' o include against Psi on elements of D"""
        return [z for z in samples if self.psi(self.include(z)) != self.comparison.psi(z)]


@dataclass
class PeriodicObstruction:
    """Image of an obstruction cocycle in negative and periodic cyclic homology"""
    cocycle: SparseVector
    image: SparseVector
    periodic: dict

    @property
    def is_zero(self):
        return all(c.is_zero() for c in self.periodic.values())

    def to_json(self):
        return {
            'zero': self.is_zero,
            'periodic': {str(w): vector_to_json(c) for w, c in sorted(self.periodic.items())},
        }


def obstruction_periodic_image(comparison, x, ext):
    """Psi of the obstruction to lifting x along ext, read in periodic cyclic homology"""
    D = comparison.D
    cocycle = obstruction_cocycle(D, x, ext)
    if cocycle and not D.d(cocycle).is_zero():
        raise NotAComplex("obstruction cocycle is not closed")
    image = comparison.psi(cocycle)
    degree = comparison.target_degree(2)
    by_weight = {}
    for (p, t), c in image.items():
        by_weight.setdefault(D.algebra.tensor_weight(t), SparseVector())[(p, t)] = c
    periodic = {w: to_periodic(series, degree, w, comparison.target) for w, series in by_weight.items()}
    result = PeriodicObstruction(cocycle, image, periodic)
    logging.info(f"periodic image of an obstruction in {D.name}: zero={result.is_zero}")
    return result


def complete_tangent(D, mu, piece):
    """A module part eta with d_D(mu, eta) = 0 for a Hochschild cocycle mu, solved exactly.

    Raises InconsistentSystem when L_mu eta_0 is not a (b + uB)-boundary.
    """
    degree = 1
    mid = IndexedBasis(D.module.keys(degree, piece))
    target = IndexedBasis(D.module.keys(degree + 1, piece))
    twist = part('m', D.d(tagged('g', mu)))
    matrix = LinearMap.from_function(mid, target, D.module.d_basis, strict=False)
    solution = solve_strict(matrix, target.to_indices(twist.scaled(-1)))
    return tagged('g', mu) + tagged('m', mid.to_keys(solution))

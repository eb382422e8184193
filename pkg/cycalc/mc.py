"""Calculus Engine - Maurer-Cartan Theory

DG-Lie algebras on SparseVectors over hashable keys, their extension to
coefficients in a test ring (elements of g (x) R are RElements), the
Maurer-Cartan equation, the gauge action, twisting, obstruction classes and
the groupoid of flat deformations of (A, eta_0).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .calculus import (CochainWindow, brace, bracket, connes_B, differential, identity_cochain, lie_L,
                       make_rng, mu_cochain, random_cochain, truncate, u_series)
from .constants import DEFAULT_U_BOUND, RANDOM_COEFFICIENTS
from .errors import ConditionViolation, ConfigError, NotMaurerCartan, TruncationExceeded
from .exactla import IndexedBasis, LinearMap, SparseVector, homology, solve_strict, vector_to_json
from .signs import commutator_sign, sign
from .testring import RElement

HALF = Fraction(1, 2)


class DGLA:
    """Differential graded Lie algebra given on basis keys.

    Subclasses provide degree, d_basis, bracket_basis and, for cohomology
    and sampling, pieces/keys. A piece is a label of a subcomplex such as a
    weight shift.
    """
    name = 'dgla'
    inner = None

    def __init__(self):
        self._d_cache = {}
        self._bracket_cache = {}

    def degree(self, key):
        raise NotImplementedError

    def d_basis(self, key):
        return SparseVector()

    def bracket_basis(self, a, b):
        raise NotImplementedError

    def pieces(self, degree):
        return [None]

    def keys(self, degree, piece=None):
        raise NotImplementedError

    def d(self, x):
        result = SparseVector()
        for key, coef in x.items():
            image = self._d_cache.get(key)
            if image is None:
                image = self.d_basis(key)
                self._d_cache[key] = image
            result.iadd_coef(coef, image)
        return result

    def bracket(self, x, y):
        result = SparseVector()
        for a, ca in x.items():
            for b, cb in y.items():
                image = self._bracket_cache.get((a, b))
                if image is None:
                    image = self.bracket_basis(a, b)
                    self._bracket_cache[(a, b)] = image
                result.iadd_coef(ca * cb, image)
        return result

    def degree_of(self, x):
        degrees = {self.degree(k) for k in x}
        if len(degrees) > 1:
            raise ConfigError(f"{self.name}: element is not homogeneous")
        return degrees.pop() if degrees else None

    def all_keys(self, degree):
        keys = []
        for piece in self.pieces(degree):
            keys.extend(self.keys(degree, piece))
        return keys

    def random_element(self, rng, degree, terms=3):
        return random_cochain(rng, self.all_keys(degree), terms)

    def cohomology(self, degree, piece=None):
        prev = IndexedBasis(self.keys(degree - 1, piece))
        mid = IndexedBasis(self.keys(degree, piece))
        nxt = IndexedBasis(self.keys(degree + 1, piece))
        d_in = LinearMap.from_function(prev, mid, self.d_basis, strict=False)
        d_out = LinearMap.from_function(mid, nxt, self.d_basis, strict=False)
        return homology(d_in, d_out), mid

    def cohomology_class(self, x, degree):
        """piece -> coordinates of the class of a cocycle"""
        by_piece = {}
        for piece in self.pieces(degree):
            keys = set(self.keys(degree, piece))
            part = SparseVector((k, c) for k, c in x.items() if k in keys)
            if part:
                by_piece[piece] = part
        covered = sum(len(v) for v in by_piece.values())
        if covered != len(x):
            raise TruncationExceeded(f"{self.name}: element leaves the window")
        classes = {}
        for piece, part in by_piece.items():
            basis, mid = self.cohomology(degree, piece)
            classes[piece] = basis.coordinates(mid.to_indices(part))
        return classes

    def structure_failures(self, rng, count, degrees=(0, 1)):
        """Sampled checks of d^2 = 0, antisymmetry, Leibniz and Jacobi"""
        failures = []
        for _ in range(count):
            x, y, z = (self.random_element(rng, rng.choice(degrees)) for _ in range(3))
            if not self.d(self.d(x)).is_zero():
                failures.append('d-squared')
            p, q, r = (self.degree_of(v) or 0 for v in (x, y, z))
            if self.bracket(x, y) + self.bracket(y, x).scaled(commutator_sign(p, q)):
                failures.append('antisymmetry')
            leibniz = self.d(self.bracket(x, y)) - self.bracket(self.d(x), y) \
                - self.bracket(x, self.d(y)).scaled(sign(p))
            if leibniz:
                failures.append('leibniz')
            jacobi = self.bracket(x, self.bracket(y, z)) - self.bracket(self.bracket(x, y), z) \
                - self.bracket(y, self.bracket(x, z)).scaled(commutator_sign(p, q))
            if jacobi:
                failures.append('jacobi')
        return sorted(set(failures))


class TableDGLA(DGLA):
    """A DGLA given by explicit degree, differential and bracket tables"""

    def __init__(self, degrees, d=None, brackets=None, name='table'):
        super().__init__()
        self.name = name
        self.degrees = dict(degrees)
        self.d_table = {k: SparseVector(v) for k, v in (d or {}).items()}
        self.brackets = {}
        for (a, b), vec in (brackets or {}).items():
            vec = SparseVector(vec)
            self.brackets[(a, b)] = vec
            self.brackets[(b, a)] = vec.scaled(-commutator_sign(self.degrees[a], self.degrees[b]))

    def degree(self, key):
        return self.degrees[key]

    def d_basis(self, key):
        return self.d_table.get(key, SparseVector())

    def bracket_basis(self, a, b):
        return self.brackets.get((a, b), SparseVector())

    def keys(self, degree, piece=None):
        return sorted(k for k, v in self.degrees.items() if v == degree)


class CochainDGLA(DGLA):
    """Normalized Hochschild cochains with dx = [mu, x] and the Gerstenhaber bracket.

    Arity m sits in degree m - 1, so A itself is degree -1. Finite algebras
    use every cochain of arity <= N + 1. Graded algebras keep the weight
    shifts delta <= 0 restricted to inputs of weight <= W, which is closed
    under the bracket and a quotient of the full algebra. With all_shifts the
    positive shifts are kept as well; the result is still a complex but the
    bracket leaves it.
    """

    def __init__(self, algebra, window=None, all_shifts=False):
        super().__init__()
        self.algebra = algebra
        self.window = window or CochainWindow(algebra)
        self.all_shifts = all_shifts
        self.name = f"C({algebra.name})"
        self.inner = mu_cochain(algebra)
        self.input_bound = self.window.weight_bound if algebra.is_graded else None

    def degree(self, key):
        return len(key[0]) - 1

    def _clip(self, x):
        if self.algebra.is_graded:
            return truncate(self.algebra, x, self.input_bound)
        bound = self.window.arity_bound
        return SparseVector((k, c) for k, c in x.items() if len(k[0]) <= bound)

    def d_basis(self, key):
        return self._clip(differential(self.algebra, SparseVector({key: 1})))

    def bracket_basis(self, a, b):
        return self._clip(bracket(self.algebra, SparseVector({a: 1}), SparseVector({b: 1})))

    def pieces(self, degree):
        deltas = self.window.deltas()
        if self.algebra.is_graded and not self.all_shifts:
            return [delta for delta in deltas if delta <= 0]
        return deltas

    def keys(self, degree, piece=None):
        if degree < -1 or degree + 1 > self.window.arity_bound:
            return []
        if piece is None:
            return self.all_keys(degree)
        return list(self.window.block(degree + 1, piece).keys)


# --- coefficients in a test ring --------------------------------------------

def r_d(g, x):
    return x.map(g.d)


def r_bracket(g, x, y):
    return x.bilinear(g.bracket, y)


def random_r_element(g, ring, rng, degree, terms=2):
    """Random element of g^degree (x) m"""
    components = {}
    keys = g.all_keys(degree)
    if not keys:
        return RElement(ring)
    for _ in range(terms):
        r = rng.choice(ring.m_basis)
        key = rng.choice(keys)
        components.setdefault(r, SparseVector()).add_term(key, rng.choice(RANDOM_COEFFICIENTS))
    return RElement(ring, components)


def mc_residual(g, y):
    """dy + 1/2 [y, y]"""
    return r_d(g, y) + r_bracket(g, y, y).scaled(HALF)


def is_mc(g, y):
    for vec in y.components.values():
        degree = g.degree_of(vec)
        if degree is not None and degree != 1:
            raise ConfigError("Maurer-Cartan elements live in degree 1")
    return mc_residual(g, y).is_zero()


def extend_mc(g, first, ring):
    """Maurer-Cartan element e*first + e^2 s_2 + ... over Q[e]/(e^n).

    `first` must be a degree 1 cocycle. Each order solves d s_k = -r_k for the
    e^k part r_k of the residual, one piece at a time; an unsolvable order
    raises InconsistentSystem.
    """
    if ring.order != tuple(range(ring.dim)):
        raise ConfigError(f"{ring.name} is not a truncated polynomial ring")
    if not g.d(first).is_zero():
        raise NotMaurerCartan("the first order term is not closed")
    x = RElement(ring, {1: first}) if ring.dim > 1 else RElement(ring)
    for k in range(2, ring.dim):
        residual = mc_residual(g, x).component(k)
        if residual.is_zero():
            continue
        correction = SparseVector()
        covered = 0
        for piece in g.pieces(2):
            target = IndexedBasis(g.keys(2, piece))
            part = SparseVector((key, c) for key, c in residual.items() if key in target)
            if part.is_zero():
                continue
            covered += len(part)
            domain = IndexedBasis(g.keys(1, piece))
            matrix = LinearMap.from_function(domain, target, g.d_basis, strict=False)
            correction += domain.to_keys(solve_strict(matrix, target.to_indices(part.scaled(-1))))
        if covered != len(residual):
            raise TruncationExceeded(f"{g.name}: order {k} residual leaves the window")
        x = x + RElement(ring, {k: correction})
        logging.debug(f"Maurer-Cartan element of {g.name} extended to order {k}")
    return x


def _series_limit(ring):
    return max(ring.nil_order, 1) + 1


def exp_ad(g, x, z):
    """e^{ad x} z for x in g^0 (x) m"""
    total = z
    term = z
    for n in range(1, _series_limit(z.ring) + 1):
        term = r_bracket(g, x, term).scaled(Fraction(1, n))
        if term.is_zero():
            return total
        total = total + term
    raise NotMaurerCartan("ad x is not nilpotent on the test ring")


def gauge(g, x, y):
    """exp(x) * y = e^{ad x} y - sum (ad x)^n (dx) / (n+1)!"""
    result = exp_ad(g, x, y)
    term = r_d(g, x)
    n = 0
    while not term.is_zero():
        result = result - term.scaled(Fraction(1, math.factorial(n + 1)))
        term = r_bracket(g, x, term)
        n += 1
        if n > _series_limit(y.ring):
            raise NotMaurerCartan("ad x is not nilpotent on the test ring")
    return result


def gauge_inner(g, x, y):
    """exp(x) * y = e^{ad x}(y + mu_0) - mu_0 for an inner differential d = [mu_0, -]"""
    if g.inner is None:
        raise ConfigError(f"{g.name} has no inner differential")
    mu0 = RElement.constant(y.ring, g.inner)
    return exp_ad(g, x, y + mu0) - mu0


def _words(budget, first=True):
    """Sequences of (r_i, s_i) with r_i + s_i >= 1 and total length <= budget"""
    if not first:
        yield ()
    for r in range(budget + 1):
        for s in range(budget + 1 - r):
            if r + s == 0:
                continue
            for rest in _words(budget - r - s, first=False):
                yield ((r, s),) + rest


def bch(g, x, y):
    """log(e^x e^y) by the Dynkin series; words longer than the nil order vanish"""
    ring = x.ring
    budget = max(ring.nil_order - 1, 1)
    total = RElement(ring)
    for word in _words(budget):
        n = len(word)
        letters = []
        denominator = 1
        for r, s in word:
            letters.extend([x] * r + [y] * s)
            denominator *= math.factorial(r) * math.factorial(s)
        value = letters[-1]
        for letter in reversed(letters[:-1]):
            value = r_bracket(g, letter, value)
            if value.is_zero():
                break
        if value.is_zero():
            continue
        coef = Fraction(sign(n - 1), n * len(letters) * denominator)
        total = total + value.scaled(coef)
    return total


def morphism_failures(source, target, f, rng, samples, degrees=(0, 1)):
    """Sampled checks of f o d = d o f and f[x, y] = [fx, fy]; returns the failing inputs"""
    failures = []
    for _ in range(samples):
        x = source.random_element(rng, rng.choice(degrees))
        y = source.random_element(rng, rng.choice(degrees))
        if f(source.d(x)) != target.d(f(x)):
            failures.append(('differential', x))
        if f(source.bracket(x, y)) != target.bracket(f(x), f(y)):
            failures.append(('bracket', x, y))
    if failures:
        logging.warning(f"{source.name} -> {target.name}: {len(failures)} failed morphism checks")
    return failures


def transport_failures(g, x, y, samples):
    """e^{ad x}: g_y -> g_{exp(x)*y} commutes with the twisted differentials"""
    target = gauge(g, x, y)
    failures = []
    for z in samples:
        left = exp_ad(g, x, r_d(g, z) + r_bracket(g, y, z))
        moved = exp_ad(g, x, z)
        right = r_d(g, moved) + r_bracket(g, target, moved)
        if left != right:
            failures.append(z)
    return failures


# --- twisting ----------------------------------------------------------------

class TwistedDGLA(DGLA):
    """g with d_y = d + [y, -] for a rational Maurer-Cartan element y"""

    def __init__(self, base, y, check=True):
        super().__init__()
        self.base = base
        self.twist = SparseVector(y)
        self.name = f"{base.name}_tw"
        if check:
            residual = base.d(self.twist) + base.bracket(self.twist, self.twist).scaled(HALF)
            if residual:
                raise NotMaurerCartan(f"twisting element is not Maurer-Cartan in {base.name}")

    def degree(self, key):
        return self.base.degree(key)

    def d_basis(self, key):
        unit = SparseVector({key: 1})
        return self.base.d(unit) + self.base.bracket(self.twist, unit)

    def bracket(self, x, y):
        return self.base.bracket(x, y)

    def bracket_basis(self, a, b):
        return self.base.bracket_basis(a, b)

    def pieces(self, degree):
        return self.base.pieces(degree)

    def keys(self, degree, piece=None):
        return self.base.keys(degree, piece)


class RTwisted:
    """g (x) R with d_y = d + [y, -] for a Maurer-Cartan element y over R"""

    def __init__(self, base, y):
        if not mc_residual(base, y).is_zero():
            raise NotMaurerCartan(f"twisting element is not Maurer-Cartan in {base.name}")
        self.base = base
        self.twist = y

    def d(self, z):
        return r_d(self.base, z) + r_bracket(self.base, self.twist, z)

    def bracket(self, z, w):
        return r_bracket(self.base, z, w)

    def square_failures(self, samples):
        return [z for z in samples if not self.d(self.d(z)).is_zero()]


def twisted(g, y, rng=None, samples=8):
    """Twist g by y and confirm d_y^2 = 0 on sampled elements"""
    if isinstance(y, RElement):
        result = RTwisted(g, y)
        rng = rng or make_rng(0)
        checks = [random_r_element(g, y.ring, rng, degree) for degree in (0, 1) for _ in range(samples)]
        if result.square_failures(checks):
            raise NotMaurerCartan("twisted differential does not square to zero")
        return result
    result = TwistedDGLA(g, y)
    rng = rng or make_rng(0)
    for _ in range(samples):
        z = g.random_element(rng, rng.choice((0, 1)))
        if result.d(result.d(z)):
            raise NotMaurerCartan("twisted differential does not square to zero")
    return result


# --- semidirect products -------------------------------------------------------

class Module:
    """DG-module over a DGLA, given on basis keys"""
    name = 'module'

    def degree(self, key):
        raise NotImplementedError

    def act_basis(self, gkey, mkey):
        raise NotImplementedError

    def d_basis(self, key):
        return SparseVector()

    def pieces(self, degree):
        return [None]

    def keys(self, degree, piece=None):
        raise NotImplementedError

    def act(self, x, m):
        result = SparseVector()
        for a, ca in x.items():
            for b, cb in m.items():
                result.iadd_coef(ca * cb, self.act_basis(a, b))
        return result

    def d(self, m):
        result = SparseVector()
        for key, coef in m.items():
            result.iadd_coef(coef, self.d_basis(key))
        return result


class TableModule(Module):
    """A module given by explicit degree, action and differential tables"""

    def __init__(self, degrees, action, d=None, name='table'):
        self.name = name
        self.degrees = dict(degrees)
        self.action = {k: SparseVector(v) for k, v in action.items()}
        self.d_table = {k: SparseVector(v) for k, v in (d or {}).items()}

    def degree(self, key):
        return self.degrees[key]

    def act_basis(self, gkey, mkey):
        return self.action.get((gkey, mkey), SparseVector())

    def d_basis(self, key):
        return self.d_table.get(key, SparseVector())

    def keys(self, degree, piece=None):
        return sorted(k for k, v in self.degrees.items() if v == degree)


def tagged(tag, vec):
    return SparseVector(((tag, k), c) for k, c in vec.items())


def part(tag, vec):
    return SparseVector((k, c) for (t, k), c in vec.items() if t == tag)


class SemidirectDGLA(DGLA):
    """g ⋉ M with keys ('g', k) and ('m', k).

    [(g, m), (g', m')] = ([g, g'], g m' - (-1)^{|g'||m|} g' m) and
    d(g, m) = (dg, d_M m).
    """

    def __init__(self, g, module, name=None):
        super().__init__()
        self.g = g
        self.module = module
        self.name = name or f"{g.name}⋉{module.name}"

    def degree(self, key):
        tag, k = key
        return self.g.degree(k) if tag == 'g' else self.module.degree(k)

    def d_basis(self, key):
        tag, k = key
        if tag == 'g':
            return tagged('g', self.g.d_basis(k))
        return tagged('m', self.module.d_basis(k))

    def bracket_basis(self, a, b):
        (ta, ka), (tb, kb) = a, b
        if ta == 'g' and tb == 'g':
            return tagged('g', self.g.bracket_basis(ka, kb))
        if ta == 'g' and tb == 'm':
            return tagged('m', self.module.act_basis(ka, kb))
        if ta == 'm' and tb == 'g':
            s = commutator_sign(self.g.degree(kb), self.module.degree(ka))
            return tagged('m', self.module.act_basis(kb, ka).scaled(-s))
        return SparseVector()

    def pieces(self, degree):
        labels = set(self.g.pieces(degree)) | set(self.module.pieces(degree))
        return sorted(labels, key=lambda p: (p is None, p))

    def keys(self, degree, piece=None):
        if piece is None and None not in self.pieces(degree):
            return self.all_keys(degree)
        g_keys = self.g.keys(degree, piece) if piece in self.g.pieces(degree) else []
        m_keys = self.module.keys(degree, piece) if piece in self.module.pieces(degree) else []
        return [('g', k) for k in g_keys] + [('m', k) for k in m_keys]

    def pair(self, gvec=None, mvec=None):
        return tagged('g', gvec or SparseVector()) + tagged('m', mvec or SparseVector())


def module_exp(sd, g, m):
    """e^g . m for g in g^0 (x) m acting on the module part"""
    total = m
    term = m
    for n in range(1, _series_limit(m.ring) + 1):
        term = r_bracket(sd, g, term).scaled(Fraction(1, n))
        if term.is_zero():
            return total
        total = total + term
    raise NotMaurerCartan("the action of g is not nilpotent on the test ring")


def r_part(tag, x):
    return x.map(lambda v: tagged(tag, part(tag, v)))


@dataclass
class SemidirectGauge:
    """exp(0, xi) exp(f, 0), the normal form of a gauge element of g ⋉ M"""
    f: RElement       # keys ('g', k), degree 0
    xi: RElement      # keys ('m', k), degree 0

    def act(self, sd, y):
        return gauge(sd, self.xi, gauge(sd, self.f, y))

    def compose(self, sd, other):
        """self . other = exp(0, xi + e^f xi') exp(bch(f, f'), 0)"""
        return SemidirectGauge(bch(sd, self.f, other.f), self.xi + module_exp(sd, self.f, other.xi))


def normal_form(sd, x):
    """exp(g, m) = exp(0, (e^{ad g} - 1)/ad g . m) exp(g, 0)"""
    g = r_part('g', x)
    m = r_part('m', x)
    total = m
    term = m
    for n in range(1, _series_limit(x.ring) + 1):
        term = r_bracket(sd, g, term)
        if term.is_zero():
            break
        total = total + term.scaled(Fraction(1, math.factorial(n + 1)))
    return SemidirectGauge(g, total)


def gauge_by_algebra_part(sd, g, y, m0):
    """exp(g, 0) * (g1, m1) = (exp(g) * g1, e^g (m1 - m0) + m0) for d_0 g = (-1)^{|g|} g m0"""
    g1 = r_part('g', y)
    m1 = r_part('m', y)
    return r_part('g', gauge(sd, g, g1)) + module_exp(sd, g, m1 - m0) + m0


def gauge_by_module_part(sd, m, y):
    """exp(0, m) * (g1, m1) = (g1, m1 - (g1 + d_M) m)"""
    g1 = r_part('g', y)
    return y - r_bracket(sd, g1, m) - r_d(sd, m)


# --- obstructions ----------------------------------------------------------------

def lift(ext, x):
    """Set-theoretic lift of an element over R to one over S"""
    components = {}
    for r, vec in x.components.items():
        components[ext.lift(r)] = vec
    return RElement(ext.source, components)


@dataclass
class ObstructionClass:
    """Class of dx^ + 1/2 [x^, x^] in H^2, coefficient of the kernel generator"""
    cocycle: SparseVector
    classes: dict

    @property
    def is_zero(self):
        return all(c.is_zero() for c in self.classes.values())

    def same_class(self, other):
        pieces = set(self.classes) | set(other.classes)
        return all(self.classes.get(p, SparseVector()) == other.classes.get(p, SparseVector()) for p in pieces)

    def to_json(self):
        return {
            'zero': self.is_zero,
            'classes': {str(p): vector_to_json(c) for p, c in self.classes.items()},
        }


def obstruction_cocycle(g, x, ext, shift=None):
    """p(x^) s = dx^ + 1/2 [x^, x^] for a lift x^ (moved by ks (x) shift when given)"""
    lifted = lift(ext, x)
    if shift is not None:
        lifted = lifted + RElement(ext.source, {ext.kernel_index: shift})
    residual = mc_residual(g, lifted)
    for r in residual.components:
        if r != ext.kernel_index:
            raise NotMaurerCartan("element is not Maurer-Cartan over the smaller ring")
    return residual.component(ext.kernel_index)


def obstruction(g, x, ext, shift=None):
    """Obstruction class to lifting x along ext"""
    cocycle = obstruction_cocycle(g, x, ext, shift)
    if cocycle and not g.d(cocycle).is_zero():
        raise NotMaurerCartan("obstruction cocycle is not closed")
    classes = g.cohomology_class(cocycle, 2) if cocycle else {}
    result = ObstructionClass(cocycle, classes)
    logging.info(f"obstruction of a Maurer-Cartan element of {g.name}: zero={result.is_zero}")
    return result


def lift_independence(g, x, ext, rng):
    """Two lifts differing by ks (x) z give the same obstruction class"""
    z = g.random_element(rng, 1)
    return obstruction(g, x, ext).same_class(obstruction(g, x, ext, shift=z))


# --- flat deformations of (A, eta_0) ---------------------------------------------

def split_u(series):
    parts = {}
    for (p, t), c in series.items():
        parts.setdefault(p, SparseVector())[t] = c
    return parts


def lie_u(algebra, x, series):
    """L_x on a u-series"""
    result = SparseVector()
    for p, chain in split_u(series).items():
        result += u_series(lie_L(algebra, x, chain), p)
    return result


def u_connes(algebra, series, upper):
    """uB on a u-series, powers above `upper` dropped"""
    result = SparseVector()
    for p, chain in split_u(series).items():
        if p + 1 <= upper:
            result += u_series(connes_B(algebra, chain), p + 1)
    return result


def r_cyclic_differential(algebra, mu, eta, upper):
    """(L_mu + uB) eta over R"""
    return mu.bilinear(lambda x, s: lie_u(algebra, x, s), eta) + eta.map(lambda s: u_connes(algebra, s, upper))


def r_compose(algebra, phi, psi):
    """phi o psi for arity-1 cochains over R"""
    return phi.bilinear(lambda a, b: brace(algebra, a, [b], normalized=False), psi)


def r_conjugate_product(algebra, mu, phi):
    """mu o (phi, phi) over R"""
    ring = phi.ring
    result = RElement(ring)
    for r, m in mu.components.items():
        for s, p1 in phi.components.items():
            for t, p2 in phi.components.items():
                coef = ring.mul(ring.mul(SparseVector({r: 1}), SparseVector({s: 1})), SparseVector({t: 1}))
                if not coef:
                    continue
                value = _two_slot(algebra, m, p1, p2)
                for k, c in coef.items():
                    result._accumulate(k, c, value)
    return result


def _two_slot(algebra, mu, first, second):
    """mu(first(a), second(b)) for arity-1 first, second and arity-2 mu"""
    result = SparseVector()
    by_out_1 = {}
    for ((a,), o), c in first.items():
        by_out_1.setdefault(o, []).append((a, c))
    by_out_2 = {}
    for ((b,), o), c in second.items():
        by_out_2.setdefault(o, []).append((b, c))
    for ((i, j), out), c in mu.items():
        for a, ca in by_out_1.get(i, ()):
            for b, cb in by_out_2.get(j, ()):
                result.add_term(((a, b), out), c * ca * cb)
    return result


def apply_to_chains(algebra, phi, series):
    """phi (x) ... (x) phi on a u-series over R, followed by normalization"""
    ring = phi.ring
    images = {}
    for r, vec in phi.components.items():
        for ((a,), o), c in vec.items():
            images.setdefault(a, {}).setdefault(r, SparseVector()).add_term(o, c)
    unit = algebra.unit
    result = RElement(ring)
    for r0, vec in series.components.items():
        for (p, t), coef in vec.items():
            partial = RElement(ring, {r0: SparseVector({(): coef})})
            for b in t:
                step = RElement(ring, images.get(b, {}))
                partial = partial.bilinear(
                    lambda prefix, outs: SparseVector((pre + (o,), c1 * c2) for pre, c1 in prefix.items()
                                                      for o, c2 in outs.items()), step)
            for r, chains in partial.components.items():
                clean = SparseVector(((p, k), c) for k, c in chains.items() if unit not in k[1:])
                result._accumulate(r, 1, clean)
    return result


def clip_cochain(algebra, x, bound):
    return x.map(lambda v: truncate(algebra, v, bound)) if bound is not None else x


@dataclass
class DefFlatObject:
    """(mu, eta) over R: a flat deformation of A carrying a negative cyclic cycle"""
    algebra: object
    mu: RElement            # full multiplication cochain, mu_0 in the R^0 component
    eta: RElement           # u-series
    eta0: SparseVector
    u_bound: int = DEFAULT_U_BOUND
    input_bound: int = None

    @property
    def ring(self):
        return self.mu.ring

    def violations(self):
        A = self.algebra
        found = []
        unit = A.unit
        for r, vec in self.mu.components.items():
            if r != 0 and any(unit in k[0] for k in vec):
                found.append((1, "-mu is not unital"))
                break
        square = clip_cochain(A, r_bracket_cochains(A, self.mu, self.mu), self.input_bound)
        if not square.is_zero():
            found.append((1, "-mu is not associative"))
        mu0 = truncate(A, mu_cochain(A), self.input_bound) if self.input_bound is not None else mu_cochain(A)
        reduced = self.mu.component(0)
        if self.input_bound is not None:
            reduced = truncate(A, reduced, self.input_bound)
        if reduced != mu0:
            found.append((2, "mu is not mu_0 modulo m"))
        if not all(_is_normalized_series_key(unit, key) for vec in self.eta.components.values() for key in vec):
            found.append((3, "eta is not a normalized negative cyclic chain"))
        if not r_cyclic_differential(A, self.mu, self.eta, self.u_bound).is_zero():
            found.append((4, "(L_mu + uB) eta != 0"))
        if self.eta.component(0) != self.eta0:
            found.append((5, "eta is not eta_0 modulo m"))
        return found

    def validate(self):
        found = self.violations()
        if found:
            raise ConditionViolation(f"invalid flat deformation: {found}", conditions=found)
        return True


def _is_normalized_series_key(unit, key):
    power, chain = key
    return power >= 0 and unit not in chain[1:]


def r_bracket_cochains(algebra, x, y):
    return x.bilinear(lambda a, b: bracket(algebra, a, b), y)


@dataclass
class DefFlatMorphism:
    """(phi, xi): phi an R-algebra map congruent to id, xi in CC^-_{d+1} (x) m"""
    source: DefFlatObject
    target: DefFlatObject
    phi: RElement
    xi: RElement

    def violations(self):
        A = self.source.algebra
        found = []
        unit = A.unit
        reduced = self.phi.component(0)
        for r, vec in self.phi.components.items():
            if r != 0 and any(k[0] == (unit,) for k in vec):
                found.append((1, "phi is not unital"))
                break
        if reduced != identity_cochain(A):
            found.append((2, "phi is not the identity modulo m"))
        bound = self.source.input_bound
        left = clip_cochain(A, r_compose(A, self.phi, self.source.mu), bound)
        right = clip_cochain(A, r_conjugate_product(A, self.target.mu, self.phi), bound)
        if left != right:
            found.append((1, "phi is not an algebra map"))
        if not self.xi.in_ideal() or not all(
                _is_normalized_series_key(unit, key) for vec in self.xi.components.values() for key in vec):
            found.append((3, "xi is not a normalized chain in m"))
        lhs = r_cyclic_differential(A, self.target.mu, self.xi, self.target.u_bound)
        rhs = apply_to_chains(A, self.phi, self.source.eta) - self.target.eta
        if lhs != rhs:
            found.append((4, "(L_mu2 + uB) xi != phi(eta1) - eta2"))
        return found

    def validate(self):
        found = self.violations()
        if found:
            raise ConditionViolation(f"invalid flat morphism: {found}", conditions=found)
        return True


def defflat_identity(obj):
    ring = obj.ring
    return DefFlatMorphism(obj, obj, RElement.constant(ring, identity_cochain(obj.algebra)), RElement(ring))


def defflat_compose(second, first):
    """(phi, xi) o (phi', xi') = (phi phi', phi(xi') + xi)"""
    if first.target is not second.source and first.target != second.source:
        raise ConfigError("morphisms are not composable")
    A = first.source.algebra
    phi = r_compose(A, second.phi, first.phi)
    xi = apply_to_chains(A, second.phi, first.xi) + second.xi
    return DefFlatMorphism(first.source, second.target, phi, xi)


def defflat_validate(item):
    return item.validate()

"""Calculus Engine - L-infinity Algebras

L-infinity algebras, modules and morphisms truncated at a Taylor arity K.
Everything lives on the shifted space: a key of g carries the degree
|g| - 1 and the n-th Taylor coefficient is a graded symmetric map of degree
one on n keys. A DGLA embeds as Q^1(sg) = -s dg, Q^2(sg, sh) = (-1)^{|g|} s[g, h].

A module V over h is stored through the semidirect product on
Sigma h (+) Sigma V: rho^{n+1}(x_1..x_n, v) with the module slot last.
Coefficients with two module slots vanish.
"""
import itertools
import logging
import math
from fractions import Fraction

from .calculus import random_cochain
from .commutative import PolyvectorSeries, PolyvectorSource
from .constants import DEFAULT_ARITY_K, RANDOM_TERMS
from .errors import ConfigError, NotMaurerCartan, RelationFailure, TruncationExceeded
from .exactla import SparseVector
from .mc import DGLA, tagged
from .signs import koszul_sign, partition_sign, set_partitions, sign, subsets, unshuffle_sign


def multilinear(coefficient, vectors):
    """Extend a map on key tuples to a multilinear map on vectors"""
    result = SparseVector()
    for terms in itertools.product(*(vec.items() for vec in vectors)):
        coef = math.prod(c for _, c in terms)
        result.iadd_coef(coef, coefficient(tuple(k for k, _ in terms)))
    return result


def unit(key):
    return SparseVector({key: 1})


def _sampled_failures(relation, sampler, arity_bound, rng, count, degrees):
    failures = []
    for n in range(1, arity_bound + 1):
        for trial in range(count):
            vectors = [sampler(rng, rng.choice(degrees)) for _ in range(n)]
            if relation(vectors):
                failures.append({'arity': n, 'trial': trial})
    return failures


class LinfAlgebra:
    """L-infinity algebra given by Taylor coefficients on basis keys.

    Subclasses provide degree, coefficient_basis and keys. ``top`` is the
    largest arity with a nonzero coefficient, None when it is not known.
    """
    name = 'linf'
    top = None

    def __init__(self, arity_bound=DEFAULT_ARITY_K):
        if arity_bound < 1:
            raise ConfigError("the arity bound K must be positive")
        self.arity_bound = arity_bound
        self._cache = {}

    def degree(self, key):
        raise NotImplementedError

    def coefficient_basis(self, keys):
        raise NotImplementedError

    def keys(self, degree):
        raise NotImplementedError

    def vanishes(self, n):
        return self.top is not None and n > self.top

    def basis_image(self, keys):
        image = self._cache.get(keys)
        if image is None:
            image = self.coefficient_basis(keys)
            self._cache[keys] = image
        return image

    def coefficient(self, vectors):
        """Q^n(x_1, .., x_n)"""
        if self.vanishes(len(vectors)) or any(not vec for vec in vectors):
            return SparseVector()
        return multilinear(self.basis_image, vectors)

    def degree_of(self, vec):
        degrees = {self.degree(k) for k in vec}
        if len(degrees) > 1:
            raise ConfigError(f"{self.name}: element is not homogeneous")
        return degrees.pop() if degrees else None

    def random_element(self, rng, degree, terms=RANDOM_TERMS):
        return random_cochain(rng, self.keys(degree), terms)

    def relation(self, vectors):
        """Sum over unshuffles of Q(Q(x_S), x_rest); zero on an L-infinity algebra"""
        result = SparseVector()
        if any(not vec for vec in vectors):
            return result
        degrees = [self.degree_of(vec) for vec in vectors]
        n = len(vectors)
        for i in range(1, n + 1):
            if self.vanishes(i) or self.vanishes(n - i + 1):
                continue
            for chosen in subsets(n, i):
                inner = self.coefficient([vectors[k] for k in chosen])
                if not inner:
                    continue
                rest = [vectors[k] for k in range(n) if k not in chosen]
                result.iadd_coef(unshuffle_sign(degrees, chosen), self.coefficient([inner] + rest))
        return result

    def relation_failures(self, rng, count, degrees=(-1, 0)):
        return _sampled_failures(self.relation, self.random_element, self.arity_bound, rng, count, degrees)

    def verified(self, rng, count, degrees=(-1, 0)):
        failures = self.relation_failures(rng, count, degrees)
        if failures:
            arity = failures[0]['arity']
            raise RelationFailure(f"{self.name}: L-infinity relation fails in arity {arity}", arity)
        return self

    def insertion_bound(self, omega, n):
        """Largest number of copies of omega that can meet n other slots"""
        if self.top is None:
            raise TruncationExceeded(f"{self.name}: twisting needs a known top arity")
        return max(self.top - n, 0)


class DGLALinf(LinfAlgebra):
    """A DGLA seen as an L-infinity algebra"""
    top = 2

    def __init__(self, g, arity_bound=DEFAULT_ARITY_K):
        super().__init__(arity_bound)
        self.g = g
        self.name = f"L({g.name})"

    def degree(self, key):
        return self.g.degree(key) - 1

    def coefficient_basis(self, keys):
        if len(keys) == 1:
            return -self.g.d_basis(keys[0])
        a, b = keys
        return self.g.bracket_basis(a, b).scaled(sign(self.g.degree(a)))

    def keys(self, degree):
        return self.g.all_keys(degree + 1)


def from_dgla(g, arity_bound=DEFAULT_ARITY_K):
    return DGLALinf(g, arity_bound)


class LinfDGLA(DGLA):
    """The DGLA of an L-infinity algebra with no coefficients above arity two"""

    def __init__(self, linf):
        if linf.top is None or linf.top > 2:
            raise ConfigError(f"{linf.name} has higher brackets")
        super().__init__()
        self.linf = linf
        self.name = f"{linf.name}_dgla"

    def degree(self, key):
        return self.linf.degree(key) + 1

    def d_basis(self, key):
        return -self.linf.basis_image((key,))

    def bracket_basis(self, a, b):
        if self.linf.vanishes(2):
            return SparseVector()
        return self.linf.basis_image((a, b)).scaled(sign(self.degree(a)))

    def keys(self, degree, piece=None):
        return self.linf.keys(degree - 1)


class Abelian(LinfAlgebra):
    """The same complex with every bracket set to zero"""
    top = 1

    def __init__(self, base):
        super().__init__(base.arity_bound)
        self.base = base
        self.name = f"{base.name}_ab"

    def degree(self, key):
        return self.base.degree(key)

    def coefficient_basis(self, keys):
        return self.base.basis_image(keys)

    def keys(self, degree):
        return self.base.keys(degree)


# --- modules -----------------------------------------------------------------------

class LinfModule:
    """L-infinity module over ``algebra``: rho^{n+1}(x_1..x_n, v) on basis keys"""
    name = 'module'
    top = None

    def __init__(self, algebra):
        self.algebra = algebra
        self._cache = {}

    def degree(self, key):
        raise NotImplementedError

    def action_basis(self, xkeys, vkey):
        raise NotImplementedError

    def keys(self, degree):
        raise NotImplementedError

    def vanishes(self, n):
        return self.top is not None and n > self.top

    def basis_image(self, xkeys, vkey):
        image = self._cache.get((xkeys, vkey))
        if image is None:
            image = self.action_basis(xkeys, vkey)
            self._cache[(xkeys, vkey)] = image
        return image

    def act(self, vectors, v):
        if self.vanishes(len(vectors) + 1) or not v or any(not vec for vec in vectors):
            return SparseVector()
        return multilinear(lambda keys: self.basis_image(keys[:-1], keys[-1]), list(vectors) + [v])

    def shifted(self, m):
        return ShiftedModule(self, m)

    def insertion_bound(self, n):
        if self.top is None:
            raise TruncationExceeded(f"{self.name}: twisting needs a known top arity")
        return max(self.top - 1 - n, 0)


class DGModule(LinfModule):
    """A DG-module over a DGLA: rho^1(sv) = -s dv, rho^2(sg, sv) = (-1)^{|g|} s(g v)"""
    top = 2

    def __init__(self, algebra, module):
        super().__init__(algebra)
        self.module = module
        self.name = f"L({module.name})"

    def degree(self, key):
        return self.module.degree(key) - 1

    def action_basis(self, xkeys, vkey):
        if not xkeys:
            return -self.module.d_basis(vkey)
        (x,) = xkeys
        return self.module.act_basis(x, vkey).scaled(sign(self.algebra.degree(x) + 1))

    def keys(self, degree):
        module = self.module
        keys = []
        for piece in module.pieces(degree + 1):
            keys.extend(module.keys(degree + 1, piece))
        return keys


class ShiftedModule(LinfModule):
    """Sigma^m V on the same keys.

    The operator rho(x_1..x_n, -) has degree 1 + sum |x_i| on the shifted
    space and passes s^m with the Koszul sign.
    """

    def __init__(self, base, m):
        super().__init__(base.algebra)
        self.base = base
        self.m = m
        self.top = base.top
        self.name = f"Σ^{m}{base.name}"

    def degree(self, key):
        return self.base.degree(key) - self.m

    def action_basis(self, xkeys, vkey):
        total = 1 + sum(self.algebra.degree(x) for x in xkeys)
        return self.base.basis_image(xkeys, vkey).scaled(sign(self.m * total))

    def keys(self, degree):
        return self.base.keys(degree + self.m)


class SemidirectLinf(LinfAlgebra):
    """h ⋉ V on keys ('g', k) and ('m', k)"""

    def __init__(self, algebra, module):
        if module.algebra is not algebra:
            raise ConfigError(f"{module.name} is not a module over {algebra.name}")
        super().__init__(algebra.arity_bound)
        self.algebra = algebra
        self.module = module
        if algebra.top is not None and module.top is not None:
            self.top = max(algebra.top, module.top)
        self.name = f"{algebra.name}⋉{module.name}"

    def degree(self, key):
        tag, k = key
        return self.algebra.degree(k) if tag == 'g' else self.module.degree(k)

    def coefficient_basis(self, keys):
        slots = [p for p, (tag, _) in enumerate(keys) if tag == 'm']
        if not slots:
            inner = tuple(k for _, k in keys)
            if self.algebra.vanishes(len(inner)):
                return SparseVector()
            return tagged('g', self.algebra.basis_image(inner))
        if len(slots) > 1 or self.module.vanishes(len(keys)):
            return SparseVector()
        p = slots[0]
        order = [i for i in range(len(keys)) if i != p] + [p]
        s = koszul_sign([self.degree(k) for k in keys], order)
        xkeys = tuple(keys[i][1] for i in order[:-1])
        return tagged('m', self.module.basis_image(xkeys, keys[p][1])).scaled(s)

    def keys(self, degree):
        return [('g', k) for k in self.algebra.keys(degree)] + [('m', k) for k in self.module.keys(degree)]

    def insertion_bound(self, omega, n):
        if all(tag == 'm' for tag, _ in omega):
            # two module slots never meet
            return 1 if self.top is None else min(1, max(self.top - n, 0))
        return super().insertion_bound(omega, n)


def semidirect(algebra, module, rng=None, samples=0, degrees=(-1, 0)):
    """h ⋉ V, with the L-infinity relations checked through K when samples > 0"""
    result = SemidirectLinf(algebra, module)
    if samples:
        result.verified(rng, samples, degrees)
    logging.info(f"Built {result.name} with arity bound {result.arity_bound}")
    return result


# --- morphisms ----------------------------------------------------------------------

class LinfMorphism:
    """Taylor coefficients psi^n: S^n(Sigma g) -> Sigma h of degree zero"""
    name = 'morphism'
    top = None

    def __init__(self, source, target, arity_bound=None):
        self.source = source
        self.target = target
        self.arity_bound = arity_bound or min(source.arity_bound, target.arity_bound)
        self._cache = {}

    def coefficient_basis(self, keys):
        raise NotImplementedError

    def vanishes(self, n):
        return self.top is not None and n > self.top

    def basis_image(self, keys):
        image = self._cache.get(keys)
        if image is None:
            image = self.coefficient_basis(keys)
            self._cache[keys] = image
        return image

    def coefficient(self, vectors):
        if self.vanishes(len(vectors)) or any(not vec for vec in vectors):
            return SparseVector()
        return multilinear(self.basis_image, vectors)

    def relation(self, vectors):
        """psi(Q(x)) - Q'(psi(x)) in arity len(vectors)"""
        result = SparseVector()
        if any(not vec for vec in vectors):
            return result
        source, target = self.source, self.target
        degrees = [source.degree_of(vec) for vec in vectors]
        n = len(vectors)
        for i in range(1, n + 1):
            if source.vanishes(i) or self.vanishes(n - i + 1):
                continue
            for chosen in subsets(n, i):
                inner = source.coefficient([vectors[k] for k in chosen])
                if not inner:
                    continue
                rest = [vectors[k] for k in range(n) if k not in chosen]
                result.iadd_coef(unshuffle_sign(degrees, chosen), self.coefficient([inner] + rest))
        for blocks in set_partitions(range(n)):
            if target.vanishes(len(blocks)) or any(self.vanishes(len(b)) for b in blocks):
                continue
            images = [self.coefficient([vectors[k] for k in block]) for block in blocks]
            if any(not image for image in images):
                continue
            result.iadd_coef(-partition_sign(degrees, blocks), target.coefficient(images))
        return result

    def relation_failures(self, rng, count, degrees=(-1, 0)):
        return _sampled_failures(self.relation, self.source.random_element, self.arity_bound, rng, count, degrees)

    def report(self, rng, count, degrees=(-1, 0)):
        failures = self.relation_failures(rng, count, degrees)
        logging.info(f"{self.name}: {len(failures)} failed relations through arity {self.arity_bound}")
        return {
            'morphism': self.name,
            'arity_bound': self.arity_bound,
            'trials': count,
            'failures': failures,
            'ok': not failures,
        }


class StrictMorphism(LinfMorphism):
    """psi^1(sx) = s f(x) for a DGLA map f given on keys; no higher coefficients"""
    top = 1

    def __init__(self, source, target, f):
        super().__init__(source, target)
        self.f = f
        self.name = f"{source.name}->{target.name}"

    def coefficient_basis(self, keys):
        return SparseVector(self.f(keys[0]))


def identity_morphism(algebra):
    return StrictMorphism(algebra, algebra, unit)


class PullbackModule(LinfModule):
    """V_psi: rho_psi(x_1..x_n, v) = sum over partitions of rho(psi(x_B1), .., psi(x_Bk), v)"""

    def __init__(self, psi, module):
        if module.algebra is not psi.target:
            raise ConfigError(f"{module.name} is not a module over the target of {psi.name}")
        super().__init__(psi.source)
        self.psi = psi
        self.base = module
        self.name = f"{module.name}_ψ"
        if psi.top == 1:
            self.top = module.top

    def degree(self, key):
        return self.base.degree(key)

    def action_basis(self, xkeys, vkey):
        algebra = self.algebra
        n = len(xkeys)
        degrees = [algebra.degree(k) for k in xkeys]
        result = SparseVector()
        for blocks in set_partitions(range(n)):
            if self.base.vanishes(len(blocks) + 1):
                continue
            images = [self.psi.coefficient([unit(xkeys[k]) for k in block]) for block in blocks]
            if any(not image for image in images):
                continue
            result.iadd_coef(partition_sign(degrees, blocks), self.base.act(images, unit(vkey)))
        return result

    def keys(self, degree):
        return self.base.keys(degree)


class PulledBackMorphism(LinfMorphism):
    """psi_V: g ⋉ V_psi -> h ⋉ V, equal to psi on S^n(Sigma g) and the identity on V"""

    def __init__(self, psi, source, target):
        super().__init__(source, target, psi.arity_bound)
        self.psi = psi
        self.top = None if psi.top is None else max(psi.top, 1)
        self.name = f"{psi.name}_V"

    def coefficient_basis(self, keys):
        if all(tag == 'g' for tag, _ in keys):
            return tagged('g', self.psi.basis_image(tuple(k for _, k in keys)))
        if len(keys) == 1:
            return unit(keys[0])
        return SparseVector()


def pullback_module(psi, module):
    """(V_psi, psi_V) for an L-infinity morphism psi: g -> h and a module V over h"""
    pulled = PullbackModule(psi, module)
    source = SemidirectLinf(psi.source, pulled)
    target = SemidirectLinf(psi.target, module)
    return pulled, PulledBackMorphism(psi, source, target)


# --- twisting -------------------------------------------------------------------

def _check_twisting_degree(algebra, omega):
    if algebra.degree_of(omega) not in (None, 0):
        raise ConfigError(f"{algebra.name}: a twisting element has degree zero on the shifted space")


def _with_insertions(func, omega, vectors, bound):
    """sum_j 1/j! func(omega^j, vectors)"""
    result = SparseVector()
    for j in range(bound + 1):
        if not vectors and j == 0:
            continue
        result.iadd_coef(Fraction(1, math.factorial(j)), func([omega] * j + list(vectors)))
    return result


def curvature(algebra, omega):
    """sum_i 1/i! Q^i(omega^i); zero exactly when omega is Maurer-Cartan"""
    if not omega:
        return SparseVector()
    return _with_insertions(algebra.coefficient, omega, [], algebra.insertion_bound(omega, 0))


class TwistedLinf(LinfAlgebra):
    """Q_omega^n(x) = sum_j 1/j! Q^{n+j}(omega^j, x)"""

    def __init__(self, base, omega, check=True):
        super().__init__(base.arity_bound)
        self.base = base
        self.omega = SparseVector(omega)
        self.top = base.top
        self.name = f"{base.name}_ω"
        _check_twisting_degree(base, self.omega)
        if check and curvature(base, self.omega):
            raise NotMaurerCartan(f"twisting element is not Maurer-Cartan in {base.name}")

    def degree(self, key):
        return self.base.degree(key)

    def coefficient_basis(self, keys):
        vectors = [unit(k) for k in keys]
        if not self.omega:
            return self.base.coefficient(vectors)
        bound = self.base.insertion_bound(self.omega, len(keys))
        return _with_insertions(self.base.coefficient, self.omega, vectors, bound)

    def keys(self, degree):
        return self.base.keys(degree)

    def insertion_bound(self, omega, n):
        return self.base.insertion_bound(omega, n)


class TwistedModule(LinfModule):
    """rho_omega(x_1..x_n, v) = sum_j 1/j! rho(omega^j, x_1..x_n, v) over the twisted algebra"""

    def __init__(self, base, algebra):
        super().__init__(algebra)
        self.base = base
        self.omega = algebra.omega
        self.top = base.top
        self.name = f"{base.name}_ω"

    def degree(self, key):
        return self.base.degree(key)

    def action_basis(self, xkeys, vkey):
        vectors = [unit(k) for k in xkeys]
        v = unit(vkey)
        if not self.omega:
            return self.base.act(vectors, v)
        bound = self.base.insertion_bound(len(xkeys))
        result = SparseVector()
        for j in range(bound + 1):
            result.iadd_coef(Fraction(1, math.factorial(j)), self.base.act([self.omega] * j + vectors, v))
        return result

    def keys(self, degree):
        return self.base.keys(degree)


class TwistedMorphism(LinfMorphism):
    """psi_omega^n(x) = sum_j 1/j! psi^{n+j}(omega^j, x) between Q_omega and Q'_omega'"""

    def __init__(self, psi, omega):
        omega = SparseVector(omega)
        if omega and psi.top is None:
            raise TruncationExceeded(f"{psi.name}: twisting needs a known top arity")
        self.psi = psi
        self.omega = omega
        source = TwistedLinf(psi.source, omega)
        self.omega_prime = _with_insertions(psi.coefficient, omega, [], psi.top) if omega else SparseVector()
        target = TwistedLinf(psi.target, self.omega_prime)
        super().__init__(source, target, psi.arity_bound)
        self.top = psi.top
        self.name = f"{psi.name}_ω"

    def coefficient_basis(self, keys):
        vectors = [unit(k) for k in keys]
        if not self.omega:
            return self.psi.coefficient(vectors)
        return _with_insertions(self.psi.coefficient, self.omega, vectors, max(self.psi.top - len(keys), 0))


def twist(item, omega):
    """Twist an L-infinity algebra, module (by an element of its algebra) or morphism at omega"""
    if isinstance(item, LinfMorphism):
        return TwistedMorphism(item, omega)
    if isinstance(item, LinfModule):
        return TwistedModule(item, TwistedLinf(item.algebra, omega))
    if isinstance(item, LinfAlgebra):
        return TwistedLinf(item, omega)
    raise ConfigError(f"cannot twist {type(item).__name__}")


# --- BV_- algebras ------------------------------------------------------------------

def _bvminus_defects(g, x, y, z):
    p, q = (g.degree_of(v) or 0 for v in (x, y))
    s = sign(p + 1)
    generated = (g.d(g.product(x, y)) - g.product(g.d(x), y) - g.product(x, g.d(y)).scaled(s)).scaled(s)
    return {
        'bracket': g.bracket(x, y) - generated,
        'leibniz': g.bracket(x, g.product(y, z)) - g.product(g.bracket(x, y), z)
        - g.product(y, g.bracket(x, z)).scaled(sign(p * (q + 1))),
        'commutative': g.product(x, y) - g.product(y, x).scaled(sign((p + 1) * (q + 1))),
        'associative': g.product(g.product(x, y), z) - g.product(x, g.product(y, z)),
    }


def bvminus_check(g, rng, count, degrees=(1, 2, 3), project=None):
    """Sampled check that a DGLA with a degree -1 product is a BV_- algebra.

    The bracket must be generated by d and the product, and be a derivation of
    the product; the product must be graded commutative and associative.
    ``project`` keeps the part of a defect that the window computes exactly.
    """
    project = project or (lambda vec: vec)
    failures = {'bracket': 0, 'leibniz': 0, 'commutative': 0, 'associative': 0}
    for _ in range(count):
        x, y, z = (g.random_element(rng, rng.choice(degrees)) for _ in range(3))
        for name, defect in _bvminus_defects(g, x, y, z).items():
            if project(defect):
                failures[name] += 1
    ok = not any(failures.values())
    logging.info(f"BV_- check on {g.name}: {count} trials, ok={ok}")
    return {'algebra': g.name, 'trials': count, 'failures': failures, 'ok': ok}


class HomotopyAbelianMorphism(LinfMorphism):
    """psi^n(v_1..v_n) = v_1 . v_2 ... v_n from a BV_- algebra to its abelianization"""

    def __init__(self, g, arity_bound=DEFAULT_ARITY_K):
        source = DGLALinf(g, arity_bound)
        super().__init__(source, Abelian(source), arity_bound)
        self.g = g
        self.name = f"ψ({g.name})"

    def coefficient_basis(self, keys):
        result = unit(keys[0])
        for key in keys[1:]:
            result = self.g.product(result, unit(key))
        return result


def homotopy_abelian_psi(g, arity_bound=DEFAULT_ARITY_K):
    return HomotopyAbelianMorphism(g, arity_bound)


class SeriesToSemidirect(LinfMorphism):
    """T_poly[[u]] -> T_poly ⋉ u T_poly[[u]] with the star action.

    The identity in arity one, products of u-terms in higher arity and zero
    on any input that mixes in a T_poly term.
    """

    def __init__(self, bv, arity_bound=DEFAULT_ARITY_K):
        source = DGLALinf(PolyvectorSeries(bv), arity_bound)
        target = DGLALinf(PolyvectorSource(bv), arity_bound)
        super().__init__(source, target, arity_bound)
        self.bv = bv
        self.name = f"φ({bv.name})"

    def coefficient_basis(self, keys):
        if len(keys) == 1:
            return unit(keys[0])
        if any(tag == 'g' for tag, _ in keys):
            return SparseVector()
        product = unit(keys[0][1])
        for _, k in keys[1:]:
            product = self.bv.product(product, unit(k))
        return tagged('a', product)

    def _tagged_sample(self, rng, tag, degrees, terms=2):
        keys = []
        for degree in rng.sample(degrees, len(degrees)):
            keys = [k for k in self.source.keys(degree) if k[0] == tag]
            if keys:
                break
        return random_cochain(rng, keys, terms)

    def case_failures(self, rng, count, degrees=(-1, 0, 1)):
        """Relations on i T_poly inputs and j u-inputs, one entry per (i, j)"""
        cases = []
        for n in range(1, self.arity_bound + 1):
            for i in range(n + 1):
                failed = 0
                for _ in range(count):
                    vectors = [self._tagged_sample(rng, 'g', degrees) for _ in range(i)]
                    vectors += [self._tagged_sample(rng, 'a', degrees) for _ in range(n - i)]
                    if self.relation(vectors):
                        failed += 1
                cases.append({'i': i, 'j': n - i, 'trials': count, 'failures': failed})
        return cases


def series_to_semidirect(bv, arity_bound=DEFAULT_ARITY_K):
    return SeriesToSemidirect(bv, arity_bound)


def series_comparison_report(bv, rng, count, arity_bound=DEFAULT_ARITY_K):
    """Star action, derivation property and the case-split L-infinity relations"""
    phi = SeriesToSemidirect(bv, arity_bound)
    dgla_failures = phi.target.g.structure_failures(rng, count, degrees=(-1, 0, 1, 2))
    cases = phi.case_failures(rng, count)
    ok = not dgla_failures and not any(case['failures'] for case in cases)
    logging.info(f"{phi.name}: {len(cases)} cases through arity {arity_bound}, ok={ok}")
    return {
        'arity_bound': arity_bound,
        'semidirect_failures': dgla_failures,
        'cases': cases,
        'ok': ok,
    }

"""Calculus Engine - Polyvector Fields and Forms

Polyvector fields and differential forms on Q^n with polynomial
coefficients truncated at a coefficient degree. A polyvector f d_I is keyed
by ``(exps, I)`` and a form f dx_J by ``(exps, J)``, with I and J strictly
increasing tuples of variable indices. The Lie degree of f d_I is |I| - 1.

Contraction by d_I is i_{d_i1} o ... o i_{d_ip} built from the usual interior
products, so i_{d_I}(dx_{reversed I} ^ dx_K) = dx_K and i_{P ^ Q} = i_P o i_Q.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from .algebra import monomials
from .calculus import ChainWindow, CochainWindow, random_cochain, u_series
from .constants import DEFAULT_POLY_CUTOFF, DEFAULT_SAMPLE_DEGREE, DEFAULT_U_BOUND
from .errors import ConfigError
from .exactla import LinearMap, SparseVector
from .mc import DGLA
from .signs import permutation_sign, sign, subsets


def add_exponents(a, b):
    return tuple(x + y for x, y in zip(a, b))


def unit_exponent(n_vars, i):
    return tuple(1 if k == i else 0 for k in range(n_vars))


class PolyCalculus:
    """Wedge, Schouten bracket, contraction and de Rham differential on Q[x_1..x_n]"""

    def __init__(self, n_vars, cutoff=DEFAULT_POLY_CUTOFF):
        if n_vars < 0 or cutoff < 0:
            raise ConfigError("polyvector calculus needs n_vars >= 0 and a non-negative cutoff")
        self.n_vars = n_vars
        self.cutoff = cutoff
        self.all_indices = tuple(range(n_vars))

    def keeps(self, exps):
        return sum(exps) <= self.cutoff

    def lie_degree(self, key):
        return len(key[1]) - 1

    def derivative(self, vec, i):
        """d/dx_i applied to the coefficients"""
        result = SparseVector()
        for (e, I), c in vec.items():
            if e[i]:
                lowered = tuple(v - 1 if k == i else v for k, v in enumerate(e))
                result.add_term((lowered, I), c * e[i])
        return result

    def multiply(self, f, vec):
        """Coefficient-wise product with a polynomial f given as exps -> coefficient"""
        result = SparseVector()
        for e1, c1 in f.items():
            for (e2, I), c2 in vec.items():
                e = add_exponents(e1, e2)
                if self.keeps(e):
                    result.add_term((e, I), c1 * c2)
        return result

    def wedge(self, P, Q):
        result = SparseVector()
        for (e1, I), c1 in P.items():
            for (e2, J), c2 in Q.items():
                if set(I) & set(J):
                    continue
                e = add_exponents(e1, e2)
                if not self.keeps(e):
                    continue
                result.add_term((e, tuple(sorted(I + J))), c1 * c2 * permutation_sign(I + J))
        return result

    def right_xi_derivative(self, P, i):
        """Derivative in the odd variable d_i acting from the right"""
        result = SparseVector()
        for (e, I), c in P.items():
            if i in I:
                k = I.index(i)
                result.add_term((e, I[:k] + I[k + 1:]), c * sign(len(I) - 1 - k))
        return result

    def schouten(self, P, Q):
        """[P, Q] = sum_i (P <d_i) ^ d_{x_i} Q - (-1)^{(p-1)(q-1)} sum_i (Q <d_i) ^ d_{x_i} P"""
        result = SparseVector()
        for k1, c1 in P.items():
            for k2, c2 in Q.items():
                p, q = len(k1[1]), len(k2[1])
                x, y = SparseVector({k1: c1}), SparseVector({k2: c2})
                s = sign((p - 1) * (q - 1))
                for i in self.all_indices:
                    result += self.wedge(self.right_xi_derivative(x, i), self.derivative(y, i))
                    result -= self.wedge(self.right_xi_derivative(y, i), self.derivative(x, i)).scaled(s)
        return result

    def contract(self, P, omega):
        """i_P omega"""
        result = SparseVector()
        for (e1, I), c1 in P.items():
            for (e2, J), c2 in omega.items():
                if not set(I) <= set(J):
                    continue
                e = add_exponents(e1, e2)
                if not self.keeps(e):
                    continue
                K = tuple(j for j in J if j not in I)
                result.add_term((e, K), c1 * c2 * permutation_sign(I[::-1] + K))
        return result

    def de_rham(self, omega):
        result = SparseVector()
        for (e, J), c in omega.items():
            for i in self.all_indices:
                if i in J or not e[i]:
                    continue
                lowered = tuple(v - 1 if k == i else v for k, v in enumerate(e))
                result.add_term((lowered, tuple(sorted((i,) + J))), c * e[i] * permutation_sign((i,) + J))
        return result

    def lie_derivative(self, P, omega):
        """L_P = i_P d + (-1)^{|P|} d i_P"""
        result = SparseVector()
        for key, c in P.items():
            x = SparseVector({key: c})
            result += self.contract(x, self.de_rham(omega))
            result += self.de_rham(self.contract(x, omega)).scaled(sign(self.lie_degree(key)))
        return result

    def keys(self, p, max_degree=DEFAULT_SAMPLE_DEGREE):
        """Polyvectors (or forms) of degree p with coefficient degree <= max_degree"""
        result = []
        for w in range(min(max_degree, self.cutoff) + 1):
            for e in monomials(self.n_vars, w):
                result.extend((e, I) for I in subsets(self.n_vars, p))
        return result

    def random_element(self, rng, p, max_degree=DEFAULT_SAMPLE_DEGREE, terms=3):
        return random_cochain(rng, self.keys(p, max_degree), terms)

    def truncated(self, vec, degree):
        """Terms whose coefficient degree is <= degree; the exponents sit at key[-2]"""
        return SparseVector((k, c) for k, c in vec.items() if sum(k[-2]) <= degree)


@dataclass
class VolumeForm:
    """eta = f dx_1 ^ ... ^ dx_n with f(0) != 0"""
    calc: PolyCalculus
    density: dict

    def __post_init__(self):
        zero = (0,) * self.calc.n_vars
        if not self.density.get(zero):
            raise ConfigError("volume form density must not vanish at the origin")
        f0 = Fraction(self.density[zero])
        rest = {e: -Fraction(c) / f0 for e, c in self.density.items() if e != zero and c}
        inverse = {zero: Fraction(1)}
        power = {zero: Fraction(1)}
        for _ in range(self.calc.cutoff):
            power = self._poly_mul(power, rest)
            if not power:
                break
            for e, c in power.items():
                inverse[e] = inverse.get(e, 0) + c
        self.inverse = {e: c / f0 for e, c in inverse.items() if c}

    def _poly_mul(self, f, g):
        result = {}
        for e1, c1 in f.items():
            for e2, c2 in g.items():
                e = add_exponents(e1, e2)
                if self.calc.keeps(e):
                    result[e] = result.get(e, 0) + c1 * c2
        return {e: c for e, c in result.items() if c}

    @classmethod
    def standard(cls, calc):
        return cls(calc, {(0,) * calc.n_vars: 1})

    @property
    def form(self):
        top = self.calc.all_indices
        return SparseVector(((e, top), Fraction(c)) for e, c in self.density.items() if c)

    def cap(self, gamma):
        return self.calc.contract(gamma, self.form)

    def cap_inverse(self, omega):
        """h dx_K -> h f^-1 sign(reversed C + K) d_C with C the complementary indices"""
        result = SparseVector()
        for (e, K), c in omega.items():
            C = tuple(i for i in self.calc.all_indices if i not in K)
            result.add_term((e, C), c * permutation_sign(C[::-1] + K))
        return self.calc.multiply(self.inverse, result)

    def divergence(self, gamma):
        return self.cap_inverse(self.calc.de_rham(self.cap(gamma)))

    def exact_degree(self, derivatives):
        """Coefficient degree up to which results with this many derivatives are exact"""
        if len(self.density) == 1:
            return self.calc.cutoff
        return self.calc.cutoff - derivatives

    def schechtman_defect(self, gamma1, gamma2):
        """(-1)^{|g1|}[g1, g2] - div(g1 ^ g2) + div(g1) ^ g2 + (-1)^{|g1|+1} g1 ^ div(g2)"""
        calc = self.calc
        degrees = {calc.lie_degree(k) for k in gamma1}
        if len(degrees) != 1:
            raise ConfigError("the first polyvector must be homogeneous")
        p = degrees.pop()
        defect = calc.schouten(gamma1, gamma2).scaled(sign(p))
        defect -= self.divergence(calc.wedge(gamma1, gamma2))
        defect += calc.wedge(self.divergence(gamma1), gamma2)
        defect += calc.wedge(gamma1, self.divergence(gamma2)).scaled(sign(p + 1))
        return calc.truncated(defect, self.exact_degree(2))


# --- HKR --------------------------------------------------------------------------

def volume_form(algebra):
    """dx_1 ^ ... ^ dx_n as a form key on a catalog polynomial algebra"""
    n = algebra.n_vars
    return SparseVector({((0,) * n, tuple(range(n))): 1})


def hkr_chain(algebra, form):
    """f dx_J -> sum over orderings of sign * f (x) x_{j1} (x) ... (x) x_{jq}"""
    n = algebra.n_vars
    variables = [algebra.monomial(unit_exponent(n, i)) for i in range(n)]
    result = SparseVector()
    for (e, J), c in form.items():
        head = algebra.monomial(e)
        for perm in itertools.permutations(range(len(J))):
            result.add_term((head,) + tuple(variables[J[k]] for k in perm), c * permutation_sign(perm))
    return result


def hkr_cochain(algebra, polyvector, input_bound):
    """f d_I -> (a_1..a_p) -> sum over orderings of sign * f d_{i1} a_1 ... d_{ip} a_p,
    on inputs of total weight <= input_bound"""
    exponents = algebra.exponents
    nonunit = [i for i in range(algebra.dim) if i != algebra.unit]
    result = SparseVector()
    for (e, I), c in polyvector.items():
        p = len(I)
        for inputs in itertools.product(nonunit, repeat=p):
            if sum(algebra.weights[a] for a in inputs) > input_bound:
                continue
            for perm in itertools.permutations(range(p)):
                coef = c * permutation_sign(perm)
                out = e
                for k, a in enumerate(inputs):
                    var = I[perm[k]]
                    power = exponents[a][var]
                    if not power:
                        coef = 0
                        break
                    coef *= power
                    out = add_exponents(out, exponents[a])
                    out = tuple(v - 1 if j == var else v for j, v in enumerate(out))
                if coef:
                    result.add_term((tuple(inputs), algebra.monomial(out)), coef)
    return result


def _rank_report(kind, degree, weight, homology_dim, images):
    rank = LinearMap(len(images), homology_dim, images).rank() if images else 0
    return {
        'kind': kind,
        'degree': degree,
        'weight': weight,
        'homology': homology_dim,
        'polynomial': len(images),
        'rank': rank,
        'ok': homology_dim == len(images) == rank,
    }


def verify_hkr(algebra, weight_bound=None):
    """Compare HH_* and HH^* of a polynomial algebra with forms and polyvectors block by block"""
    if not algebra.is_graded or algebra.exponents is None:
        raise ConfigError(f"{algebra.name} is not a polynomial algebra")
    n = algebra.n_vars
    chains = ChainWindow(algebra, weight_bound=weight_bound)
    cochains = CochainWindow(algebra, weight_bound=chains.weight_bound)
    W = chains.weight_bound
    blocks = []
    for q in range(n + 1):
        for w in range(q, W + 1):
            homology = chains.hochschild_homology(q, w)
            basis = chains.basis(q, w)
            images = []
            for e in monomials(n, w - q):
                for J in subsets(n, q):
                    cycle = hkr_chain(algebra, SparseVector({(e, J): 1}))
                    images.append(homology.coordinates(basis.to_indices(cycle)))
            blocks.append(_rank_report('chains', q, w, homology.dim, images))
    for p in range(n + 1):
        for delta in cochains.deltas():
            bound = cochains.input_bound(delta)
            if bound < p or delta + p < 0:
                continue
            homology = cochains.cohomology(p, delta)
            block = cochains.block(p, delta)
            images = []
            for e in monomials(n, delta + p):
                for I in subsets(n, p):
                    cocycle = hkr_cochain(algebra, SparseVector({(e, I): 1}), bound)
                    images.append(homology.coordinates(block.to_indices(cocycle)))
            blocks.append(_rank_report('cochains', p, delta, homology.dim, images))
    failures = [b for b in blocks if not b['ok']]
    logging.info(f"HKR comparison on {algebra.name} at W={W}: {len(blocks)} blocks, {len(failures)} failures")
    return {'algebra': algebra.name, 'W': W, 'blocks': blocks, 'ok': not failures}


def catalog_eta(algebra):
    """HKR image of the standard volume form as a u-series"""
    return u_series(hkr_chain(algebra, volume_form(algebra)))


# --- the BV algebra u T_poly[[u]] ----------------------------------------------------

def by_power(vec):
    """(k, exps, I) keys -> {k: polyvector}"""
    parts = {}
    for (k, e, I), c in vec.items():
        parts.setdefault(k, SparseVector())[(e, I)] = c
    return parts


def with_power(k, vec):
    return SparseVector(((k,) + key, c) for key, c in vec.items())


class BVMinus(DGLA):
    """u T_poly[[u]] with D = -u div, the Schouten bracket and g.h = u^-1 (g ^ h).

    Keys are (k, exps, I) for u^k f d_I with 1 <= k <= U; the degree is
    |I| - 1 + 2k.
    """

    def __init__(self, volume, u_bound=DEFAULT_U_BOUND, sample_degree=DEFAULT_SAMPLE_DEGREE):
        super().__init__()
        self.volume = volume
        self.calc = volume.calc
        self.u_bound = u_bound
        self.sample_degree = sample_degree
        self.name = f"uT_poly[[u]](n={self.calc.n_vars})"

    def degree(self, key):
        k, _, I = key
        return len(I) - 1 + 2 * k

    def _combine(self, x, y, func, shift):
        result = SparseVector()
        for a, gx in by_power(x).items():
            for b, gy in by_power(y).items():
                k = a + b + shift
                if k <= self.u_bound:
                    result += with_power(k, func(gx, gy))
        return result

    def bracket(self, x, y):
        return self._combine(x, y, self.calc.schouten, 0)

    def bracket_basis(self, a, b):
        return self.bracket(SparseVector({a: 1}), SparseVector({b: 1}))

    def product(self, x, y):
        return self._combine(x, y, self.calc.wedge, -1)

    def d(self, x):
        result = SparseVector()
        for k, g in by_power(x).items():
            if k + 1 <= self.u_bound:
                result -= with_power(k + 1, self.volume.divergence(g))
        return result

    def d_basis(self, key):
        return self.d(SparseVector({key: 1}))

    def star(self, gamma, a):
        """gamma * a = [gamma, a] + (-1)^{|gamma|} div(gamma) ^ a for gamma in T_poly"""
        calc = self.calc
        result = SparseVector()
        for key, c in gamma.items():
            g = SparseVector({key: c})
            div = self.volume.divergence(g)
            for k, alpha in by_power(a).items():
                term = calc.schouten(g, alpha) + calc.wedge(div, alpha).scaled(sign(calc.lie_degree(key)))
                result += with_power(k, term)
        return result

    def keys(self, degree, piece=None):
        result = []
        for k in range(1, self.u_bound + 1):
            p = degree + 1 - 2 * k
            if 0 <= p <= self.calc.n_vars:
                result.extend((k,) + key for key in self.calc.keys(p, self.sample_degree))
        return result

    def exact(self, vec, derivatives=2):
        return self.calc.truncated(vec, self.volume.exact_degree(derivatives))

    def bracket_defect(self, g, h):
        """[g, h] - (-1)^{|g|+1}(D(g.h) - Dg.h - (-1)^{|g|+1} g.Dh)"""
        p = self.degree_of(g)
        s = sign(p + 1)
        expected = (self.d(self.product(g, h)) - self.product(self.d(g), h)
                    - self.product(g, self.d(h)).scaled(s)).scaled(s)
        return self.exact(self.bracket(g, h) - expected)

    def leibniz_defect(self, g, h1, h2):
        """[g, h1.h2] - [g, h1].h2 - (-1)^{|g|(|h1|+1)} h1.[g, h2]"""
        p, q = self.degree_of(g), self.degree_of(h1)
        defect = self.bracket(g, self.product(h1, h2)) - self.product(self.bracket(g, h1), h2) \
            - self.product(h1, self.bracket(g, h2)).scaled(sign(p * (q + 1)))
        return self.exact(defect)

    def commutativity_defect(self, g, h):
        """g.h - (-1)^{(|g|+1)(|h|+1)} h.g"""
        p, q = self.degree_of(g), self.degree_of(h)
        return self.exact(self.product(g, h) - self.product(h, g).scaled(sign((p + 1) * (q + 1))))


# --- the comparison map T_poly x| uT_poly[[u]] -> T_poly x| Omega[[u]] ----------------

class PolyvectorSource(DGLA):
    """T_poly x| u T_poly[[u]] with D(g, a) = (0, -u div g - u div a).

    Keys are ('g', (exps, I)) and ('a', (k, exps, I)).
    """

    def __init__(self, bv):
        super().__init__()
        self.bv = bv
        self.calc = bv.calc
        self.name = 'T_poly⋉uT_poly[[u]]'

    def degree(self, key):
        tag, k = key
        return self.calc.lie_degree(k) if tag == 'g' else self.bv.degree(k)

    def d_basis(self, key):
        tag, k = key
        if tag == 'g':
            if self.bv.u_bound < 1:
                return SparseVector()
            div = self.bv.volume.divergence(SparseVector({k: 1}))
            return SparseVector((('a', (1,) + kk), -c) for kk, c in div.items())
        return SparseVector((('a', kk), c) for kk, c in self.bv.d_basis(k).items())

    def bracket_basis(self, a, b):
        (ta, ka), (tb, kb) = a, b
        if ta == 'g' and tb == 'g':
            image = self.calc.schouten(SparseVector({ka: 1}), SparseVector({kb: 1}))
            return SparseVector((('g', kk), c) for kk, c in image.items())
        if ta == 'g' and tb == 'a':
            image = self.bv.star(SparseVector({ka: 1}), SparseVector({kb: 1}))
            return SparseVector((('a', kk), c) for kk, c in image.items())
        if ta == 'a' and tb == 'g':
            s = sign(self.calc.lie_degree(kb) * self.bv.degree(ka))
            return self.bracket_basis(b, a).scaled(-s)
        return SparseVector()

    def keys(self, degree, piece=None):
        calc = self.calc
        result = []
        if 0 <= degree + 1 <= calc.n_vars:
            result.extend(('g', k) for k in calc.keys(degree + 1, self.bv.sample_degree))
        result.extend(('a', k) for k in self.bv.keys(degree))
        return result


class PolyvectorSeries(PolyvectorSource):
    """T_poly[[u]] with the u-linear Schouten bracket and D = -u div.

    Same keys and differential as T_poly x| u T_poly[[u]]; only the bracket
    differs: a T_poly term acts on u^k by the plain Schouten bracket and two
    u-terms bracket to u^{k1+k2}.
    """

    def __init__(self, bv):
        super().__init__(bv)
        self.name = 'T_poly[[u]]'

    def bracket_basis(self, a, b):
        (ta, ka), (tb, kb) = a, b
        if ta == 'g' and tb == 'g':
            return super().bracket_basis(a, b)
        power = (0 if ta == 'g' else ka[0]) + (0 if tb == 'g' else kb[0])
        if power > self.bv.u_bound:
            return SparseVector()
        left = SparseVector({ka if ta == 'g' else ka[1:]: 1})
        right = SparseVector({kb if tb == 'g' else kb[1:]: 1})
        return SparseVector((('a', (power,) + kk), c) for kk, c in self.calc.schouten(left, right).items())


class FormTarget(DGLA):
    """T_poly x| Omega[[u]] twisted by (0, eta): D(g, m) = (0, -u dm - (-1)^{|g|} L_g eta).

    Keys are ('g', (exps, I)) and ('m', (k, exps, J)) with 0 <= k < U; the
    degree of u^k times a q-form is 2k - q + n + 1.
    """

    def __init__(self, volume, u_bound=DEFAULT_U_BOUND, sample_degree=DEFAULT_SAMPLE_DEGREE):
        super().__init__()
        self.volume = volume
        self.calc = volume.calc
        self.u_bound = u_bound
        self.sample_degree = sample_degree
        self.name = 'T_poly⋉Ω[[u]]'

    def degree(self, key):
        tag, k = key
        if tag == 'g':
            return self.calc.lie_degree(k)
        power, _, J = k
        return 2 * power - len(J) + self.calc.n_vars + 1

    def d_basis(self, key):
        tag, k = key
        calc = self.calc
        if tag == 'g':
            image = calc.lie_derivative(SparseVector({k: 1}), self.volume.form)
            return SparseVector((('m', (0,) + kk), -sign(calc.lie_degree(k)) * c) for kk, c in image.items())
        power, e, J = k
        if power + 1 >= self.u_bound:
            return SparseVector()
        image = calc.de_rham(SparseVector({(e, J): 1}))
        return SparseVector((('m', (power + 1,) + kk), -c) for kk, c in image.items())

    def bracket_basis(self, a, b):
        (ta, ka), (tb, kb) = a, b
        calc = self.calc
        if ta == 'g' and tb == 'g':
            image = calc.schouten(SparseVector({ka: 1}), SparseVector({kb: 1}))
            return SparseVector((('g', kk), c) for kk, c in image.items())
        if ta == 'g' and tb == 'm':
            power, e, J = kb
            image = calc.lie_derivative(SparseVector({ka: 1}), SparseVector({(e, J): 1}))
            return SparseVector((('m', (power,) + kk), c) for kk, c in image.items())
        if ta == 'm' and tb == 'g':
            s = sign(calc.lie_degree(kb) * self.degree(a))
            return self.bracket_basis(b, a).scaled(-s)
        return SparseVector()

    def keys(self, degree, piece=None):
        calc = self.calc
        n = calc.n_vars
        result = []
        if 0 <= degree + 1 <= n:
            result.extend(('g', k) for k in calc.keys(degree + 1, self.sample_degree))
        for power in range(self.u_bound):
            q = 2 * power + n + 1 - degree
            if 0 <= q <= n:
                result.extend(('m', (power,) + k) for k in calc.keys(q, self.sample_degree))
        return result


def delta_prime(volume, x):
    """(g, a) -> (g, u^-1 i_a eta)"""
    result = SparseVector()
    for (tag, key), c in x.items():
        if tag == 'g':
            result.add_term(('g', key), c)
            continue
        power, e, I = key
        image = volume.cap(SparseVector({(e, I): c}))
        for kk, v in image.items():
            result.add_term(('m', (power - 1,) + kk), v)
    return result


def comparison_dglas(volume, u_bound=DEFAULT_U_BOUND, sample_degree=DEFAULT_SAMPLE_DEGREE):
    """(source, target, map) for the polyvector to forms comparison"""
    bv = BVMinus(volume, u_bound, sample_degree)
    source = PolyvectorSource(bv)
    target = FormTarget(volume, u_bound, sample_degree)
    return source, target, lambda x: delta_prime(volume, x)

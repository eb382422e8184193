"""Calculus Engine - Hochschild Operator Calculus

Cochains are SparseVectors keyed by ``(inputs, out)`` where ``inputs`` is a
tuple of basis indices and ``out`` a basis index; a cochain of arity n has
cohomological degree n - 1. Chains are SparseVectors keyed by basis tuples
``(b0, b1, ..., bn)`` of homological degree n. Operators on chains are graded
cohomologically: |i_x| = |x| + 1, |L_x| = |x|, |b| = 1, |B| = -1.

Normalized chains never carry the unit beyond position 0 and normalized
cochains vanish whenever an input is the unit. The multiplication cochain
mu(a, b) = -ab is the one exception and is stored on every pair.
"""
import itertools
import logging
import random
from functools import lru_cache

from .constants import RANDOM_COEFFICIENTS, RANDOM_TERMS
from .errors import DimensionMismatch, NotAComplex
from .exactla import IndexedBasis, LinearMap, SparseVector, homology
from .signs import commutator_sign, shift_sign, sign


# --- cochains -------------------------------------------------------------

def cochain_degree(key):
    return len(key[0]) - 1


def weight_shift(algebra, key):
    inputs, out = key
    return algebra.weights[out] - algebra.tensor_weight(inputs)


def input_weight(algebra, key):
    return algebra.tensor_weight(key[0])


def homogeneous_parts(x):
    """Split a cochain into arity -> homogeneous cochain"""
    parts = {}
    for key, coef in x.items():
        parts.setdefault(len(key[0]), SparseVector())[key] = coef
    return parts


def degree_of(x):
    """Degree of a homogeneous cochain (None for zero)"""
    arities = {len(key[0]) for key in x}
    if len(arities) > 1:
        raise DimensionMismatch("cochain is not homogeneous")
    return arities.pop() - 1 if arities else None


@lru_cache(maxsize=None)
def mu_cochain(algebra):
    """mu(a, b) = -ab on every stored pair, unit included"""
    mu = SparseVector()
    for (i, j), vec in algebra.table.items():
        for k, c in vec.items():
            mu[((i, j), k)] = -c
    return mu


def unit_cochain(algebra):
    """The arity-0 cochain 1"""
    return SparseVector({((), algebra.unit): 1})


def identity_cochain(algebra):
    """id as an arity-1 cochain on every basis element (not normalized)"""
    return SparseVector({((i,), i): 1 for i in range(algebra.dim)})


def by_inputs(x):
    index = {}
    for (inputs, out), coef in x.items():
        index.setdefault(inputs, SparseVector())[out] = coef
    return index


def by_output(x):
    index = {}
    for (inputs, out), coef in x.items():
        index.setdefault(out, []).append((inputs, coef))
    return index


def truncate(algebra, x, input_bound):
    """Restrict a cochain to inputs of weight <= input_bound"""
    if input_bound is None:
        return SparseVector(x)
    return SparseVector((k, c) for k, c in x.items() if algebra.tensor_weight(k[0]) <= input_bound)


def evaluate(algebra, x, inputs):
    """x(inputs) as a SparseVector over the basis"""
    result = SparseVector()
    for (ins, out), coef in x.items():
        if ins == tuple(inputs):
            result.add_term(out, coef)
    return result


def _brace_homogeneous(x, arities, indexes, unit, normalized, result):
    m = len(arities)
    degrees = [a - 1 for a in arities]
    for (inputs, out), coef in x.items():
        n = len(inputs)
        if n < m:
            continue
        for slots in itertools.combinations(range(n), m):
            choices = []
            for k, slot in enumerate(slots):
                matches = indexes[k].get(inputs[slot])
                if matches is None:
                    break
                choices.append(matches)
            else:
                exponent = sum(degrees[k] * (slots[k] - k + sum(arities[:k])) for k in range(m))
                base = coef * sign(exponent)
                for picked in itertools.product(*choices):
                    new_inputs = []
                    value = base
                    k = 0
                    for position in range(n):
                        if k < m and position == slots[k]:
                            new_inputs.extend(picked[k][0])
                            value *= picked[k][1]
                            k += 1
                        else:
                            new_inputs.append(inputs[position])
                    if normalized and unit in new_inputs:
                        continue
                    result.add_term((tuple(new_inputs), out), value)


def brace(algebra, x, args, normalized=True):
    """x{x_1, ..., x_m} with sign sum |x_k| i_k, i_k the arguments preceding x_k"""
    if not args:
        return SparseVector(x)
    result = SparseVector()
    parts = [sorted(homogeneous_parts(a).items()) for a in args]
    for combo in itertools.product(*parts):
        arities = [arity for arity, _ in combo]
        indexes = [by_output(part) for _, part in combo]
        _brace_homogeneous(x, arities, indexes, algebra.unit, normalized, result)
    return result


def bracket(algebra, x, y, normalized=True):
    """Gerstenhaber bracket [x,y] = x{y} - (-1)^{|x||y|} y{x}"""
    result = SparseVector()
    for p, xp in homogeneous_parts(x).items():
        for q, yq in homogeneous_parts(y).items():
            result += brace(algebra, xp, [yq], normalized)
            result.iadd_coef(-commutator_sign(p - 1, q - 1), brace(algebra, yq, [xp], normalized))
    return result


def cup(algebra, x, y):
    """x cup y = (-1)^{|x|} mu{x, y}"""
    mu = mu_cochain(algebra)
    result = SparseVector()
    for p, xp in homogeneous_parts(x).items():
        result.iadd_coef(sign(p - 1), brace(algebra, mu, [xp, y]))
    return result


@lru_cache(maxsize=None)
def _mu_by_factor(algebra):
    """(slot, element) -> [(inputs, out, coef)] over the multiplication cochain"""
    index = {}
    for (inputs, out), coef in mu_cochain(algebra).items():
        for slot, element in enumerate(inputs):
            index.setdefault((slot, element), []).append((inputs, out, coef))
    return index


@lru_cache(maxsize=None)
def _mu_by_output(algebra):
    return by_output(mu_cochain(algebra))


def differential(algebra, x):
    """dx = [mu, x] = mu{x} - (-1)^{|x|} x{mu}, through cached indexes of mu"""
    unit = algebra.unit
    by_factor = _mu_by_factor(algebra)
    by_product = _mu_by_output(algebra)
    result = SparseVector()
    for (inputs, out), coef in x.items():
        q = len(inputs)
        for slot in (0, 1):
            for mu_inputs, mu_out, c in by_factor.get((slot, out), ()):
                new_inputs = mu_inputs[:slot] + inputs + mu_inputs[slot + 1:]
                if unit not in new_inputs:
                    result.add_term((new_inputs, mu_out), c * coef * sign((q - 1) * slot))
        s = -commutator_sign(1, q - 1)
        for k in range(q):
            for mu_inputs, c in by_product.get(inputs[k], ()):
                new_inputs = inputs[:k] + mu_inputs + inputs[k + 1:]
                if unit not in new_inputs:
                    result.add_term((new_inputs, out), s * c * coef * sign(k))
    return result


def random_cochain(rng, keys, terms=RANDOM_TERMS):
    """Random combination of a few keys drawn from a cochain or chain basis"""
    keys = list(keys)
    vec = SparseVector()
    if not keys:
        return vec
    for key in rng.sample(keys, min(terms, len(keys))):
        vec.add_term(key, rng.choice(RANDOM_COEFFICIENTS))
    return vec


# --- chain operators ------------------------------------------------------

def _contract_basis(algebra, index, t, out):
    b0 = t[0]
    for arity, table in index.items():
        if arity > len(t) - 1:
            continue
        values = table.get(t[1:arity + 1])
        if not values:
            continue
        rest = t[arity + 1:]
        for v, c in values.items():
            for k, e in algebra.multiply(b0, v).items():
                out.add_term((k,) + rest, c * e)


def _split_index(x):
    index = {}
    for (inputs, o), coef in x.items():
        index.setdefault(len(inputs), {}).setdefault(inputs, SparseVector())[o] = coef
    return index


def contraction(algebra, x, chain):
    """i_x(b0 (x) ... (x) bn) = b0 x(b1..bp) (x) b(p+1) ... (x) bn"""
    index = _split_index(x)
    result = SparseVector()
    for t, coef in chain.items():
        part = SparseVector()
        _contract_basis(algebra, index, t, part)
        result.iadd_coef(coef, part)
    return result


def _lie_basis(algebra, index, t, out, normalized):
    n = len(t) - 1
    unit = algebra.unit
    for m, table in index.items():
        if m > n + 1:
            continue
        degree = m - 1
        for i in range(0, n - m + 1):
            values = table.get(t[i + 1:i + m + 1])
            if not values:
                continue
            s = sign(degree * i)
            head, tail = t[:i + 1], t[i + m + 1:]
            for v, c in values.items():
                if normalized and v == unit:
                    continue
                out.add_term(head + (v,) + tail, s * c)
        for i in range(max(0, n - m + 1), n + 1):
            front = m - n + i
            values = table.get(t[i + 1:] + t[:front])
            if not values:
                continue
            s = sign(n * (i + 1) + degree)
            middle = t[front:i + 1]
            for v, c in values.items():
                out.add_term((v,) + middle, s * c)


def _lie(algebra, index, chain, normalized):
    result = SparseVector()
    for t, coef in chain.items():
        part = SparseVector()
        _lie_basis(algebra, index, t, part, normalized)
        result.iadd_coef(coef, part)
    return result


def lie_L(algebra, x, chain, normalized=True):
    """Lie derivative L_x: insertion in place plus the cyclic wrap-around terms"""
    return _lie(algebra, _split_index(x), chain, normalized)


@lru_cache(maxsize=None)
def _mu_split(algebra):
    return _split_index(mu_cochain(algebra))


def hoch_b(algebra, chain, normalized=True):
    """b = L_mu"""
    return _lie(algebra, _mu_split(algebra), chain, normalized)


def insertion_terms(algebra, x, chain, normalized=True):
    """Cyclic insertions of x into a chain, grouped by shape.

    For x(a_{j+1}..a_{j+m}) = v the word (a_0, .., a_j, v, a_{j+m+1}, .., a_n)
    is rotated to start at its position r and prefixed with the unit; the
    result maps (n, m, j, r) to the sum of those chains. Normalized terms
    carrying the unit past position 0 are dropped.
    """
    index = _split_index(x)
    unit = algebra.unit
    shapes = {}
    for t, coef in chain.items():
        n = len(t) - 1
        for m, table in index.items():
            for j in range(n - m + 1):
                values = table.get(t[j + 1:j + m + 1])
                if not values:
                    continue
                for v, c in values.items():
                    word = t[:j + 1] + (v,) + t[j + m + 1:]
                    for r in range(len(word)):
                        rotated = word[r:] + word[:r]
                        if normalized and unit in rotated:
                            continue
                        shapes.setdefault((n, m, j, r), SparseVector()).add_term((unit,) + rotated, coef * c)
    return shapes


def _connes_basis(algebra, t, out, normalized):
    n = len(t) - 1
    unit = algebra.unit
    for k in range(n + 1):
        rotated = t[n - k + 1:] + t[:n - k + 1]
        s = sign(n * k)
        if normalized:
            if unit in rotated:
                continue
            out.add_term((unit,) + rotated, s)
        else:
            lifted = (unit,) + rotated
            out.add_term(lifted, s)
            out.add_term((lifted[-1],) + lifted[:-1], -s * sign(n + 1))


def connes_B(algebra, chain, normalized=True):
    """Connes differential: s o N normalized, (1 - t) o s o N otherwise"""
    result = SparseVector()
    for t, coef in chain.items():
        part = SparseVector()
        _connes_basis(algebra, t, part, normalized)
        result.iadd_coef(coef, part)
    return result


def chain_weight(algebra, t):
    return algebra.tensor_weight(t)


def apply_shifted(operator, r, vec):
    """Operator acting on s^r c: (-1)^{r|P|} s^r P(c)"""
    return operator(vec).scaled(shift_sign(r, operator.degree))


# --- operators ------------------------------------------------------------

class Operator:
    """Graded linear operator given on basis keys, with a per-key cache"""

    def __init__(self, degree, on_basis, name='op'):
        self.degree = degree
        self.name = name
        self._on_basis = on_basis
        self._cache = {}

    def __repr__(self):
        return f"Operator({self.name}, degree={self.degree})"

    def basis_image(self, key):
        image = self._cache.get(key)
        if image is None:
            image = self._on_basis(key)
            self._cache[key] = image
        return image

    def __call__(self, vec):
        result = SparseVector()
        for key, coef in vec.items():
            result.iadd_coef(coef, self.basis_image(key))
        return result

    def compose(self, other):
        """self o other"""
        return Operator(self.degree + other.degree, lambda k: self(other.basis_image(k)),
                        name=f"{self.name}.{other.name}")

    def commutator(self, other):
        """[P, Q] = PQ - (-1)^{|P||Q|} QP"""
        s = commutator_sign(self.degree, other.degree)
        return Operator(self.degree + other.degree,
                        lambda k: self(other.basis_image(k)).iadd_coef(-s, other(self.basis_image(k))),
                        name=f"[{self.name},{other.name}]")

    def __add__(self, other):
        return Operator(self.degree, lambda k: self.basis_image(k) + other.basis_image(k),
                        name=f"{self.name}+{other.name}")

    def __sub__(self, other):
        return Operator(self.degree, lambda k: self.basis_image(k) - other.basis_image(k),
                        name=f"{self.name}-{other.name}")

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, scalar):
        return Operator(self.degree, lambda k: self.basis_image(k).scaled(scalar), name=f"{scalar}{self.name}")

    @classmethod
    def zero(cls, degree):
        return cls(degree, lambda k: SparseVector(), name='0')

    @classmethod
    def identity(cls):
        return cls(0, lambda k: SparseVector({k: 1}), name='id')

    @classmethod
    def from_table(cls, degree, table, name='table'):
        """Operator given by an explicit {key: image} table; missing keys map to 0"""
        return cls(degree, lambda k: SparseVector(table.get(k, {})), name=name)

    def matrix(self, domain, codomain, strict=True):
        """Matrix between two IndexedBasis objects"""
        return LinearMap.from_function(domain, codomain, self.basis_image, strict=strict)

    def differs_on(self, other, keys):
        """First key on which the two operators disagree, or None"""
        for key in keys:
            if self.basis_image(key) != other.basis_image(key):
                return key
        return None


def op_b(algebra, normalized=True):
    return Operator(1, lambda t: hoch_b(algebra, SparseVector({t: 1}), normalized), name='b')


def op_B(algebra, normalized=True):
    return Operator(-1, lambda t: connes_B(algebra, SparseVector({t: 1}), normalized), name='B')


def op_i(algebra, x):
    """i_x for a homogeneous cochain x"""
    degree = degree_of(x)
    index = _split_index(x)

    def on_basis(t):
        out = SparseVector()
        _contract_basis(algebra, index, t, out)
        return out
    return Operator((degree if degree is not None else 0) + 1, on_basis, name='i')


def op_L(algebra, x, normalized=True):
    """L_x for a homogeneous cochain x"""
    degree = degree_of(x)
    index = _split_index(x)

    def on_basis(t):
        out = SparseVector()
        _lie_basis(algebra, index, t, out, normalized)
        return out
    return Operator(degree if degree is not None else 0, on_basis, name='L')


def u_operator(components, upper=None, degree=None):
    """Operator sum_q u^q P_q on u-series keys (p, t); powers above `upper` are dropped"""
    if degree is None:
        degree = next(op.degree + 2 * q for q, op in components.items())

    def on_basis(key):
        p, t = key
        out = SparseVector()
        base = SparseVector({t: 1})
        for q, op in components.items():
            if upper is not None and p + q > upper:
                continue
            for t2, c in op(base).items():
                out.add_term((p + q, t2), c)
        return out
    return Operator(degree, on_basis, name='u-op')


def u_coefficient(series, p):
    """Chain coefficient of u^p in a u-series"""
    return SparseVector((t, c) for (q, t), c in series.items() if q == p)


def u_series(chain, p=0):
    """u^p c as a u-series"""
    return SparseVector(((p, t), c) for t, c in chain.items())


def u_shift(series, q, upper=None):
    """Multiply a u-series by u^q"""
    return SparseVector(((p + q, t), c) for (p, t), c in series.items() if upper is None or p + q <= upper)


# --- windows --------------------------------------------------------------

class ChainWindow:
    """Normalized chains of weight <= W (graded) or arity <= N (finite)"""

    def __init__(self, algebra, weight_bound=None, arity_bound=None):
        self.algebra = algebra
        self.weight_bound = algebra.max_weight if weight_bound is None else weight_bound
        self.arity_bound = algebra.arity_bound if arity_bound is None else arity_bound
        self._cache = {}

    def weights(self):
        if self.algebra.is_graded:
            return list(range(self.weight_bound + 1))
        return self.algebra.chain_weights()

    def arities(self, w):
        if self.algebra.is_graded:
            return list(range(0, w + 1))
        return list(range(0, self.arity_bound + 1))

    def tensors(self, n, w):
        key = (n, w)
        if key not in self._cache:
            if n < 0 or n > self.arity_bound and not self.algebra.is_graded:
                self._cache[key] = ()
            elif self.algebra.is_graded and (w > self.weight_bound or n > w):
                self._cache[key] = ()
            else:
                self._cache[key] = self.algebra.tensor_basis(n, w)
        return self._cache[key]

    def all_keys(self, max_weight=None):
        keys = []
        for w in self.weights():
            if max_weight is not None and w > max_weight:
                continue
            for n in self.arities(w):
                keys.extend(self.tensors(n, w))
        return keys

    def contains(self, t):
        n = len(t) - 1
        w = self.algebra.tensor_weight(t)
        if self.algebra.is_graded:
            return w <= self.weight_bound
        return n <= self.arity_bound

    def basis(self, n, w):
        return IndexedBasis(self.tensors(n, w))

    def b_matrix(self, n, w, normalized=True):
        """b: C_n -> C_{n-1} at weight w"""
        domain, codomain = self.basis(n, w), self.basis(n - 1, w)
        return op_b(self.algebra, normalized).matrix(domain, codomain)

    def hochschild_homology(self, n, w):
        d_in = self.b_matrix(n + 1, w)
        d_out = self.b_matrix(n, w)
        return homology(d_in, d_out)


class CochainWindow:
    """Normalized cochains by (arity, weight shift).

    For graded algebras the block (m, delta) holds cochains on inputs of
    weight <= W - max(delta, 0); restriction to such inputs is a quotient
    complex, so its cohomology is computed exactly. Finite algebras use
    every input of arity <= N + 1.
    """

    def __init__(self, algebra, weight_bound=None, arity_bound=None):
        self.algebra = algebra
        self.weight_bound = algebra.max_weight if weight_bound is None else weight_bound
        self.arity_bound = (algebra.arity_bound + 1) if arity_bound is None else arity_bound
        self._blocks = {}
        self._d = {}

    def input_bound(self, delta):
        if self.algebra.is_graded:
            return self.weight_bound - max(delta, 0)
        return None

    def block(self, arity, delta):
        key = (arity, delta)
        if key in self._blocks:
            return self._blocks[key]
        A = self.algebra
        keys = []
        if A.is_graded:
            bound = self.input_bound(delta)
            for v in range(arity, bound + 1):
                if v + delta < 0 or v + delta > A.storage_bound:
                    continue
                outs = A.basis_of_weight(v + delta)
                for inputs in A.nonunit_tuples(arity, v):
                    keys.extend((inputs, o) for o in outs)
        elif arity <= self.arity_bound:
            for inputs in A.nonunit_tuples(arity):
                v = A.tensor_weight(inputs)
                for o in range(A.dim):
                    if A.weights[o] - v == delta:
                        keys.append((inputs, o))
        basis = IndexedBasis(sorted(keys))
        self._blocks[key] = basis
        return basis

    def deltas(self):
        A = self.algebra
        if A.is_graded:
            return list(range(-self.weight_bound, self.weight_bound + 1))
        top = max(A.weights)
        return list(range(-top * self.arity_bound, top + 1))

    def differential_matrix(self, arity, delta):
        """d: block(arity, delta) -> block(arity + 1, delta)"""
        key = (arity, delta)
        if key in self._d:
            return self._d[key]
        domain, codomain = self.block(arity, delta), self.block(arity + 1, delta)
        bound = self.input_bound(delta)
        columns = []
        for k in domain.keys:
            dk = truncate(self.algebra, differential(self.algebra, SparseVector({k: 1})), bound)
            if not self.algebra.is_graded and arity + 1 > self.arity_bound:
                dk = SparseVector()
            columns.append(codomain.to_indices(dk))
        matrix = LinearMap(len(domain), len(codomain), columns)
        self._d[key] = matrix
        return matrix

    def cohomology(self, arity, delta):
        """HH^arity at weight shift delta"""
        d_out = self.differential_matrix(arity, delta)
        if arity == 0:
            d_in = LinearMap(0, len(self.block(0, delta)))
        else:
            d_in = self.differential_matrix(arity - 1, delta)
        result = homology(d_in, d_out)
        logging.debug(f"HH^{arity} at shift {delta}: dim {result.dim}")
        return result

    def check_complex(self, arity, delta):
        """d o d = 0 on the block"""
        composite = self.differential_matrix(arity + 1, delta).compose(self.differential_matrix(arity, delta))
        entry = composite.first_nonzero()
        if entry is not None:
            raise NotAComplex(f"d o d != 0 on cochains of arity {arity}, shift {delta}", entry=entry)


def make_rng(seed):
    """Deterministic PRNG shared by every randomized suite"""
    return random.Random(seed)

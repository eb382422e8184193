"""Calculus Engine - Algebras

Associative unital algebras given by structure constants. Two kinds share
one interface:

* ``graded``: weight-graded connected (weight 0 is Q.1), stored through a
  weight bound W. Normalized factors have weight >= 1, so every per-weight
  chain space is finite without cutting arity.
* ``finite``: finite dimensional, with an arity bound N for chains. Weight
  labels are optional and only split the complexes into smaller blocks.
"""
import itertools
import logging
import re
from dataclasses import dataclass, field

from .constants import DEFAULT_ARITY_BOUND, DEFAULT_WEIGHT_BOUND, VARIABLE_NAMES
from .errors import AlgebraValidationError, ConfigError, TruncationExceeded
from .exactla import SparseVector, as_fraction

FINITE = 'finite'
GRADED = 'graded'


@dataclass(frozen=True)
class NormalizedBasis:
    """Basis of B (x) Bbar^n at total weight w"""
    arity: int
    weight: int
    tensors: tuple


class AlgebraSpec:
    """Algebra presented by a multiplication table on an ordered basis"""

    def __init__(self, name, kind, names, weights, unit, table, weight_bound, arity_bound,
                 exponents=None, storage_bound=None):
        self.name = name
        self.kind = kind
        self.names = tuple(names)
        self.weights = tuple(weights)
        self.unit = unit
        self.table = table
        self.weight_bound = weight_bound
        self.arity_bound = arity_bound
        self.storage_bound = weight_bound if storage_bound is None else storage_bound
        self.exponents = exponents
        self.nonunit = tuple(i for i in range(len(self.names)) if i != unit)
        self._by_weight = {}
        for i, w in enumerate(self.weights):
            self._by_weight.setdefault(w, []).append(i)
        self._exponent_index = {e: i for i, e in enumerate(exponents)} if exponents else None
        self._tensor_cache = {}

    def __repr__(self):
        return f"AlgebraSpec({self.name}, kind={self.kind}, dim={self.dim})"

    @property
    def dim(self):
        return len(self.names)

    @property
    def is_graded(self):
        return self.kind == GRADED

    @property
    def n_vars(self):
        return len(self.exponents[0]) if self.exponents else 0

    def weight(self, i):
        return self.weights[i]

    def tensor_weight(self, tensor):
        return sum(self.weights[i] for i in tensor)

    def basis_of_weight(self, w):
        return list(self._by_weight.get(w, []))

    @property
    def max_weight(self):
        return self.weight_bound if self.is_graded else max(self.weights)

    def multiply(self, i, j):
        """Product of two basis elements as a SparseVector"""
        if self.is_graded and self.weights[i] + self.weights[j] > self.storage_bound:
            raise TruncationExceeded(
                f"{self.name}: product of weight {self.weights[i] + self.weights[j]} exceeds the stored weights")
        return self.table.get((i, j), _EMPTY)

    def mul(self, a, b):
        """Product of two SparseVectors over the basis"""
        result = SparseVector()
        for i, x in a.items():
            for j, y in b.items():
                result.iadd_coef(x * y, self.multiply(i, j))
        return result

    def monomial(self, exponents):
        """Basis index of a monomial of a polynomial algebra"""
        index = self._exponent_index.get(tuple(exponents)) if self._exponent_index else None
        if index is None:
            raise TruncationExceeded(f"{self.name}: monomial {exponents} outside the window")
        return index

    def window_basis(self):
        """Basis indices of weight <= W"""
        return [i for i in range(self.dim) if self.weights[i] <= self.max_weight]

    def label(self, i):
        return self.names[i]

    def format_tensor(self, tensor):
        return "(x)".join(self.names[i] for i in tensor)

    def nonunit_tuples(self, n, w=None):
        """Ordered tuples of n non-unit basis elements, of total weight w when given"""
        key = (n, w)
        if key not in self._tensor_cache:
            if w is None:
                tuples = list(itertools.product(self.nonunit, repeat=n))
            else:
                tuples = list(self._weighted_tuples(n, w))
            self._tensor_cache[key] = tuple(sorted(tuples))
        return self._tensor_cache[key]

    def _weighted_tuples(self, n, w):
        if n == 0:
            if w == 0:
                yield ()
            return
        for i in self.nonunit:
            wi = self.weights[i]
            if wi > w:
                continue
            if self.is_graded and wi == 0:
                continue
            for rest in self._weighted_tuples(n - 1, w - wi):
                yield (i,) + rest

    def normalized_tensors(self, n, w=None):
        """Deterministic basis of B (x) Bbar^n at weight w (all weights when w is None)"""
        if self.is_graded:
            if w is None:
                raise ConfigError("graded algebras need an explicit weight")
            if w > self.storage_bound:
                raise TruncationExceeded(f"{self.name}: weight {w} exceeds the stored weights")
            if n > w:
                return NormalizedBasis(n, w, ())
        elif n > self.arity_bound:
            raise TruncationExceeded(f"{self.name}: arity {n} exceeds N={self.arity_bound}")
        return NormalizedBasis(n, w, self.tensor_basis(n, w))

    def tensor_basis(self, n, w=None):
        """Sorted normalized tensors of arity n and weight w, without window checks"""
        tensors = []
        for b0 in range(self.dim):
            if w is None:
                rests = self.nonunit_tuples(n)
            else:
                remaining = w - self.weights[b0]
                if remaining < 0:
                    continue
                rests = self.nonunit_tuples(n, remaining)
            tensors.extend((b0,) + rest for rest in rests)
        return tuple(sorted(tensors))

    def chain_weights(self):
        """Weights carried by chains of this algebra inside its window"""
        if self.is_graded:
            return list(range(self.weight_bound + 1))
        top = max(self.weights) * (self.arity_bound + 1)
        return list(range(top + 1))

    def to_json(self):
        mult = []
        for (i, j), vec in sorted(self.table.items()):
            mult.append([i, j, [[str(c), k] for k, c in vec.sorted_items()]])
        return {
            'name': self.name,
            'kind': self.kind,
            'basis': [{'name': n, 'weight': w} for n, w in zip(self.names, self.weights)],
            'unit': self.unit,
            'mult': mult,
            'weight_bound': self.weight_bound,
            'arity_bound': self.arity_bound,
        }


_EMPTY = SparseVector()


def validate_algebra(spec):
    """Check unit, associativity and weight additivity on every stored triple"""
    dim = spec.dim
    unit_vec = lambda i: SparseVector({i: 1})
    for i in range(dim):
        if spec.multiply(spec.unit, i) != unit_vec(i) or spec.multiply(i, spec.unit) != unit_vec(i):
            raise AlgebraValidationError(f"{spec.name}: unit law fails on {spec.names[i]}",
                                         witness=(spec.unit, i))
    for (i, j), vec in spec.table.items():
        for k in vec:
            if spec.weights[k] != spec.weights[i] + spec.weights[j]:
                raise AlgebraValidationError(
                    f"{spec.name}: {spec.names[i]}*{spec.names[j]} is not weight-additive", witness=(i, j))
    for i, j, k in itertools.product(range(dim), repeat=3):
        if spec.is_graded and spec.weights[i] + spec.weights[j] + spec.weights[k] > spec.storage_bound:
            continue
        left = spec.mul(spec.multiply(i, j), unit_vec(k))
        right = spec.mul(unit_vec(i), spec.multiply(j, k))
        if left != right:
            raise AlgebraValidationError(
                f"{spec.name}: associativity fails on ({spec.names[i]}, {spec.names[j]}, {spec.names[k]})",
                witness=(i, j, k))
    if spec.is_graded and spec.basis_of_weight(0) != [spec.unit]:
        raise AlgebraValidationError(f"{spec.name}: graded algebra is not connected")
    logging.debug(f"algebra {spec.name} validated: dim {dim}, kind {spec.kind}")
    return spec


def build_finite(names, table, unit=0, weights=None, arity_bound=DEFAULT_ARITY_BOUND, name=None):
    """Validated finite algebra from a structure-constant table.

    table maps (i, j) to a SparseVector or a {k: coefficient} mapping;
    missing pairs multiply to zero.
    """
    weights = tuple(weights) if weights is not None else tuple(0 for _ in names)
    if len(weights) != len(names):
        raise ConfigError("weights and basis differ in length")
    if not 0 <= unit < len(names):
        raise ConfigError(f"unit index {unit} outside the basis")
    clean = {}
    for (i, j), vec in table.items():
        vec = vec if isinstance(vec, SparseVector) else SparseVector(vec)
        if vec:
            clean[(i, j)] = vec
    spec = AlgebraSpec(name or "A", FINITE, names, weights, unit, clean,
                       weight_bound=max(weights) if weights else 0, arity_bound=arity_bound)
    return validate_algebra(spec)


def _monomial_name(exponents):
    if not any(exponents):
        return '1'
    parts = []
    for var, e in zip(VARIABLE_NAMES, exponents):
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
    return '*'.join(parts)


def monomials(n_vars, weight):
    """Exponent tuples of the given total degree, largest first"""
    if n_vars == 0:
        return [()] if weight == 0 else []
    result = []
    for first in range(weight, -1, -1):
        for rest in monomials(n_vars - 1, weight - first):
            result.append((first,) + rest)
    return result


def build_polynomial(n_vars, weight_bound=DEFAULT_WEIGHT_BOUND, storage_bound=None):
    """Q[x_1..x_n] with every variable of weight 1.

    Chains are windowed at weight W, but products are stored through a larger
    storage bound (2W + 2 by default) so that operators which raise weight can
    be evaluated exactly on the window.
    """
    if n_vars < 0 or weight_bound < 0:
        raise ConfigError("polynomial algebra needs n_vars >= 0 and W >= 0")
    if n_vars > len(VARIABLE_NAMES):
        raise ConfigError(f"at most {len(VARIABLE_NAMES)} variables are supported")
    if storage_bound is None:
        storage_bound = 2 * weight_bound + 2
    exponents = []
    for w in range(storage_bound + 1):
        exponents.extend(monomials(n_vars, w))
    if n_vars == 0:
        exponents = [()]
    index = {e: i for i, e in enumerate(exponents)}
    table = {}
    for i, a in enumerate(exponents):
        for j, b in enumerate(exponents):
            product = tuple(x + y for x, y in zip(a, b))
            k = index.get(product)
            if k is not None:
                table[(i, j)] = SparseVector({k: 1})
    var_label = ','.join(VARIABLE_NAMES[:n_vars])
    name = f"Q[{var_label}]" if n_vars else 'Q'
    spec = AlgebraSpec(name, GRADED, [_monomial_name(e) for e in exponents], [sum(e) for e in exponents],
                       0, table, weight_bound if n_vars else 0, arity_bound=DEFAULT_ARITY_BOUND,
                       exponents=tuple(exponents), storage_bound=storage_bound if n_vars else 0)
    logging.debug(f"built {name} through weight {spec.weight_bound}: dim {spec.dim}")
    return spec


def truncated_polynomial_algebra(n, arity_bound=DEFAULT_ARITY_BOUND):
    """Q[x]/(x^n) as a finite algebra with weight labels"""
    if n < 1:
        raise ConfigError("Q[x]/(x^n) needs n >= 1")
    names = ['1'] + [_monomial_name((k,)) for k in range(1, n)]
    table = {(i, j): {i + j: 1} for i in range(n) for j in range(n) if i + j < n}
    return build_finite(names, table, unit=0, weights=range(n), arity_bound=arity_bound,
                        name=f"Q[x]/(x^{n})")


def dual_numbers(arity_bound=DEFAULT_ARITY_BOUND):
    """K2 = Q[x]/(x^2)"""
    spec = truncated_polynomial_algebra(2, arity_bound=arity_bound)
    spec.name = 'K2'
    return spec


def upper_triangular(arity_bound=DEFAULT_ARITY_BOUND):
    """2x2 upper triangular matrices on the basis 1, E22, E12"""
    table = {
        (0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1},
        (1, 0): {1: 1}, (2, 0): {2: 1},
        (1, 1): {1: 1},
        (2, 1): {2: 1},
    }
    return build_finite(['1', 'E22', 'E12'], table, unit=0, arity_bound=arity_bound, name='T2')


_TRUNCATED = re.compile(r"^Q\[x\]/\(x\^(\d+)\)$")


def catalog(name, weight_bound=DEFAULT_WEIGHT_BOUND, arity_bound=DEFAULT_ARITY_BOUND):
    """Built-in algebras by name"""
    polynomial = {'Q': 0, 'Q[x]': 1, 'Q[x,y]': 2, 'Q[x,y,z]': 3}
    if name in polynomial:
        spec = build_polynomial(polynomial[name], weight_bound)
        spec.arity_bound = arity_bound
        return spec
    if name == 'K2':
        return dual_numbers(arity_bound)
    if name == 'T2':
        return upper_triangular(arity_bound)
    match = _TRUNCATED.match(name)
    if match:
        return truncated_polynomial_algebra(int(match.group(1)), arity_bound)
    raise ConfigError(f"unknown catalog algebra: {name}")


def algebra_from_json(data):
    """Load an AlgebraSpec from the algebra-spec JSON layout"""
    try:
        kind = data['kind']
        names = [b['name'] for b in data['basis']]
        weights = [int(b.get('weight', 0)) for b in data['basis']]
        unit = int(data['unit'])
        table = {}
        for i, j, terms in data['mult']:
            table[(int(i), int(j))] = SparseVector((int(k), as_fraction(c)) for c, k in terms)
        weight_bound = int(data.get('weight_bound', max(weights)))
        arity_bound = int(data.get('arity_bound', DEFAULT_ARITY_BOUND))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed algebra spec: {e}")
    if kind in ('graded', 'graded_connected'):
        clean = {key: vec for key, vec in table.items() if vec}
        spec = AlgebraSpec(data.get('name', 'A'), GRADED, names, weights, unit, clean,
                           weight_bound, arity_bound)
        return validate_algebra(spec)
    if kind == 'finite':
        return build_finite(names, table, unit=unit, weights=weights, arity_bound=arity_bound,
                            name=data.get('name', 'A'))
    raise ConfigError(f"unknown algebra kind: {kind}")


@dataclass
class RAlgebra:
    """A (x) R, free over R on the basis of A; basis keys are (ring index, algebra index)"""
    base: AlgebraSpec
    ring: object
    keys: tuple = field(default=())

    def __post_init__(self):
        self.keys = tuple((r, a) for r in range(self.ring.dim) for a in range(self.base.dim))

    @property
    def dim(self):
        return len(self.keys)

    def multiply(self, x, y):
        (r, a), (s, b) = x, y
        result = SparseVector()
        ring_part = self.ring.multiply(r, s)
        if not ring_part:
            return result
        for k, c in self.base.table.get((a, b), _EMPTY).items():
            for t, e in ring_part.items():
                result.add_term((t, k), c * e)
        return result

    def mul(self, x, y):
        result = SparseVector()
        for k1, c1 in x.items():
            for k2, c2 in y.items():
                result.iadd_coef(c1 * c2, self.multiply(k1, k2))
        return result

    def reduce(self, vector):
        """Reduction modulo m: A (x) R -> A"""
        return SparseVector((a, c) for (r, a), c in vector.items() if r == 0)

    def include(self, vector):
        """A -> A (x) R, a |-> a (x) 1"""
        return SparseVector(((0, a), c) for a, c in vector.items())

    def to_spec(self):
        """The same algebra as a finite AlgebraSpec over Q"""
        position = {key: i for i, key in enumerate(self.keys)}
        table = {}
        for x in self.keys:
            for y in self.keys:
                vec = SparseVector((position[k], c) for k, c in self.multiply(x, y).items())
                if vec:
                    table[(position[x], position[y])] = vec
        names = [f"{self.ring.basis[r]}*{self.base.names[a]}" for r, a in self.keys]
        weights = [self.base.weights[a] for _, a in self.keys]
        return build_finite(names, table, unit=position[(0, self.base.unit)], weights=weights,
                            arity_bound=self.base.arity_bound,
                            name=f"{self.base.name}(x){self.ring.name}")


def base_change(algebra, ring):
    """A (x) R with multiplication extended R-bilinearly"""
    return RAlgebra(base=algebra, ring=ring)

"""Calculus Engine - Test Rings

Finite dimensional commutative local Q-algebras (R, m) used as coefficients
for deformations, together with RElement, the representation of elements
of V (x) R for any space V whose elements are SparseVectors.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .constants import MAX_TRUNCATED_POLY
from .errors import AlgebraValidationError, ConfigError
from .exactla import LinearMap, SparseVector, as_fraction


@dataclass
class TestRing:
    """Artinian local test ring with basis[0] = 1 and m spanned by m_basis"""
    __test__ = False

    name: str
    basis: tuple
    mult_table: dict            # (i, j) -> SparseVector over basis indices
    m_basis: tuple
    nil_order: int = 0
    order: tuple = field(default=())   # m-adic order of each basis element

    @property
    def dim(self):
        return len(self.basis)

    def multiply(self, i, j):
        return self.mult_table.get((i, j), SparseVector())

    def mul(self, a, b):
        """Product of two ring elements given as index vectors"""
        result = SparseVector()
        for i, x in a.items():
            for j, y in b.items():
                result.iadd_coef(x * y, self.multiply(i, j))
        return result

    def one(self):
        return SparseVector({0: 1})

    def element(self, index, coef=1):
        return SparseVector({index: coef})

    def residue(self, a):
        """Image in R/m = Q"""
        return a.get(0, Fraction(0))

    def validate(self):
        """Check unit, commutativity, associativity, locality and nilpotency"""
        n = self.dim
        if n == 0 or self.basis[0] is None:
            raise AlgebraValidationError(f"{self.name}: empty basis")
        for i in range(n):
            if self.multiply(0, i) != SparseVector({i: 1}) or self.multiply(i, 0) != SparseVector({i: 1}):
                raise AlgebraValidationError(f"{self.name}: basis[0] is not a unit", witness=(0, i))
            for j in range(n):
                if self.multiply(i, j) != self.multiply(j, i):
                    raise AlgebraValidationError(f"{self.name}: not commutative", witness=(i, j))
        for i in range(n):
            for j in range(n):
                left_ij = self.multiply(i, j)
                for k in range(n):
                    left = self.mul(left_ij, self.element(k))
                    right = self.mul(self.element(i), self.multiply(j, k))
                    if left != right:
                        raise AlgebraValidationError(f"{self.name}: not associative", witness=(i, j, k))
        if sorted(self.m_basis) != list(range(1, n)):
            raise AlgebraValidationError(f"{self.name}: m must be spanned by the non-unit basis")
        for i in self.m_basis:
            for j in self.m_basis:
                if 0 in self.multiply(i, j):
                    raise AlgebraValidationError(f"{self.name}: m is not an ideal", witness=(i, j))
        computed = self._compute_nil_order()
        if self.nil_order and computed != self.nil_order:
            raise AlgebraValidationError(
                f"{self.name}: stated nil order {self.nil_order}, computed {computed}")
        self.nil_order = computed
        logging.debug(f"test ring {self.name} validated: dim {n}, nil order {computed}")
        return self

    def _compute_nil_order(self):
        power = [SparseVector({i: 1}) for i in self.m_basis]
        order = 1
        while power:
            products = [self.mul(a, self.element(i)) for a in power for i in self.m_basis]
            power = [products[k] for k in LinearMap(len(products), self.dim, products).pivot_columns()]
            order += 1
            if order > self.dim + 1:
                raise AlgebraValidationError(f"{self.name}: m is not nilpotent")
        return order

    def to_json(self):
        return {
            'name': self.name,
            'basis': list(self.basis),
            'm_basis': list(self.m_basis),
            'nil_order': self.nil_order,
        }


def truncated_polynomial(n):
    """Q[e]/(e^n); n = 1 gives Q itself"""
    if not 1 <= n <= MAX_TRUNCATED_POLY:
        raise ConfigError(f"truncated polynomial ring needs 1 <= n <= {MAX_TRUNCATED_POLY}, got {n}")
    basis = tuple(['1'] + [f"e^{k}" if k > 1 else 'e' for k in range(1, n)])
    table = {}
    for i in range(n):
        for j in range(n):
            if i + j < n:
                table[(i, j)] = SparseVector({i + j: 1})
    ring = TestRing(name=f"Q[e]/(e^{n})", basis=basis, mult_table=table,
                    m_basis=tuple(range(1, n)), nil_order=n, order=tuple(range(n)))
    return ring.validate()


def square_zero_two_variables():
    """Q[e1,e2]/(e1,e2)^2"""
    table = {(0, 0): SparseVector({0: 1})}
    for i in (1, 2):
        table[(0, i)] = SparseVector({i: 1})
        table[(i, 0)] = SparseVector({i: 1})
    ring = TestRing(name="Q[e1,e2]/(e1,e2)^2", basis=('1', 'e1', 'e2'), mult_table=table,
                    m_basis=(1, 2), nil_order=2, order=(0, 1, 1))
    return ring.validate()


def ring_from_json(data):
    """Load a test ring from the {name, basis, mult, m_basis} JSON layout"""
    try:
        basis = tuple(data['basis'])
        table = {}
        for i, j, terms in data['mult']:
            table[(i, j)] = SparseVector((k, as_fraction(c)) for c, k in terms)
        ring = TestRing(name=data.get('name', 'R'), basis=basis, mult_table=table,
                        m_basis=tuple(data['m_basis']))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed test ring: {e}")
    return ring.validate()


@dataclass
class Extension:
    """Small extension S -> R whose kernel is spanned by one basis element of S"""
    source: TestRing     # S
    target: TestRing     # R
    kernel_index: int    # basis index in S spanning ker(S -> R)

    def project(self, index):
        """Basis index of S -> index vector in R"""
        if index == self.kernel_index or index >= self.target.dim:
            return SparseVector()
        return SparseVector({index: 1})

    def lift(self, index):
        """Set-theoretic section R -> S on basis indices"""
        return index


def truncation_extension(n):
    """Q[e]/(e^(n+1)) -> Q[e]/(e^n) with kernel spanned by e^n"""
    return Extension(source=truncated_polynomial(n + 1), target=truncated_polynomial(n), kernel_index=n)


class RElement:
    """Element of V (x) R stored as ring index -> SparseVector over V"""

    def __init__(self, ring, components=None):
        self.ring = ring
        self.components = {}
        for r, vec in (components or {}).items():
            if vec:
                self.components[r] = SparseVector(vec)

    @classmethod
    def constant(cls, ring, vector):
        """vector (x) 1"""
        return cls(ring, {0: vector})

    @classmethod
    def zero(cls, ring):
        return cls(ring)

    def component(self, r):
        return self.components.get(r, SparseVector())

    def is_zero(self):
        return not self.components

    def reduce(self):
        """Image modulo m"""
        return self.component(0)

    def in_ideal(self):
        """True when every coefficient lies in m"""
        return 0 not in self.components

    def __add__(self, other):
        result = RElement(self.ring, self.components)
        for r, vec in other.components.items():
            result._accumulate(r, 1, vec)
        return result

    def __sub__(self, other):
        result = RElement(self.ring, self.components)
        for r, vec in other.components.items():
            result._accumulate(r, -1, vec)
        return result

    def __neg__(self):
        return self.scaled(-1)

    def __eq__(self, other):
        if not isinstance(other, RElement):
            return NotImplemented
        return self.components == other.components

    def _accumulate(self, r, coef, vec):
        current = self.components.get(r, SparseVector())
        current.iadd_coef(coef, vec)
        if current:
            self.components[r] = current
        else:
            self.components.pop(r, None)

    def scaled(self, scalar):
        return RElement(self.ring, {r: v.scaled(scalar) for r, v in self.components.items()})

    def times_ring(self, a):
        """Multiply by a ring element given as an index vector"""
        result = RElement(self.ring)
        for s, coef in a.items():
            for r, vec in self.components.items():
                for t, c in self.ring.multiply(s, r).items():
                    result._accumulate(t, coef * c, vec)
        return result

    def map(self, func):
        """Extend a Q-linear map R-linearly"""
        result = RElement(self.ring)
        for r, vec in self.components.items():
            result._accumulate(r, 1, func(vec))
        return result

    def bilinear(self, func, other):
        """Extend a Q-bilinear map R-bilinearly"""
        result = RElement(self.ring)
        for r, x in self.components.items():
            for s, y in other.components.items():
                product = self.ring.multiply(r, s)
                if not product:
                    continue
                value = func(x, y)
                if not value:
                    continue
                for t, c in product.items():
                    result._accumulate(t, c, value)
        return result

    def __repr__(self):
        return f"RElement({self.ring.name}, {self.components})"

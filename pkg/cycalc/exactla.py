"""Calculus Engine - Exact Linear Algebra Module

Vectors are sparse dictionaries keyed by arbitrary sortable basis labels with
``fractions.Fraction`` coefficients; the reductions themselves run on sympy's
sparse ``DomainMatrix`` over QQ. Linear maps are stored column by column and
every pivot choice is the one the row reduction makes, so solutions and
homology representatives are reproducible between runs.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import (
    DimensionMismatch, InconsistentSystem, NotAChainMap, NotAComplex, TruncationExceeded,
)


class SparseVector(dict):
    """Finitely supported vector: basis label -> Fraction, zeros never stored"""

    def __init__(self, data=()):
        """Build from a mapping or an iterable of (key, coefficient) pairs"""
        super().__init__()
        self.iadd_coef(1, data)

    def __missing__(self, key):
        return Fraction(0)

    def iadd_coef(self, coef, other):
        """self += coef * other"""
        if coef == 0:
            return self
        items = other.items() if isinstance(other, dict) else other
        for key, value in items:
            if value == 0:
                continue
            value = Fraction(value) * coef
            total = self.get(key, 0) + value
            if total == 0:
                del self[key]
            else:
                self[key] = total
        return self

    def add_term(self, key, coef):
        """Add a single basis term"""
        if coef == 0:
            return self
        total = self.get(key, 0) + Fraction(coef)
        if total == 0:
            del self[key]
        else:
            self[key] = total
        return self

    def copy(self):
        return SparseVector(self)

    def __iadd__(self, other):
        return self.iadd_coef(1, other)

    def __isub__(self, other):
        return self.iadd_coef(-1, other)

    def __add__(self, other):
        return SparseVector(self).iadd_coef(1, other)

    def __sub__(self, other):
        return SparseVector(self).iadd_coef(-1, other)

    def __neg__(self):
        return self.scaled(-1)

    def __mul__(self, scalar):
        return self.scaled(scalar)

    def __rmul__(self, scalar):
        return self.scaled(scalar)

    def scaled(self, scalar):
        """Return scalar * self"""
        result = SparseVector()
        if scalar == 0:
            return result
        scalar = Fraction(scalar)
        for key, value in self.items():
            dict.__setitem__(result, key, value * scalar)
        return result

    def is_zero(self):
        return len(self) == 0

    def dot(self, other):
        """Euclidean pairing on shared keys"""
        if len(other) < len(self):
            self, other = other, self
        return sum((value * other.get(key, 0) for key, value in self.items()), Fraction(0))

    def sorted_items(self):
        """Items in deterministic key order"""
        return sorted(self.items(), key=lambda item: item[0])

    def leading_key(self):
        """Smallest key in the support"""
        return min(self)


def as_fraction(value):
    """Parse an int, Fraction or 'p/q' string into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def fraction_to_str(value):
    """Bit-exact rational serialization used by every report"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value):
    return Fraction(int(value.numerator), int(value.denominator))


class LinearMap:
    """Sparse matrix stored by columns: column j is the image of basis vector j"""

    def __init__(self, domain_dim, codomain_dim, columns=None):
        """Initialize a map; columns is a list of {row: value} dictionaries"""
        self.domain_dim = domain_dim
        self.codomain_dim = codomain_dim
        if columns is None:
            columns = [SparseVector() for _ in range(domain_dim)]
        if len(columns) != domain_dim:
            raise DimensionMismatch(f"expected {domain_dim} columns, got {len(columns)}")
        self.columns = []
        for column in columns:
            column = column if isinstance(column, SparseVector) else SparseVector(column)
            for row in column:
                if not 0 <= row < codomain_dim:
                    raise DimensionMismatch(f"row index {row} outside codomain of size {codomain_dim}")
            self.columns.append(column)

    @classmethod
    def from_rows(cls, rows):
        """Build from a dense list of rows"""
        codomain_dim = len(rows)
        domain_dim = len(rows[0]) if rows else 0
        columns = [SparseVector((i, rows[i][j]) for i in range(codomain_dim)) for j in range(domain_dim)]
        return cls(domain_dim, codomain_dim, columns)

    @classmethod
    def identity(cls, dim):
        return cls(dim, dim, [SparseVector({j: 1}) for j in range(dim)])

    @classmethod
    def zero(cls, domain_dim, codomain_dim):
        return cls(domain_dim, codomain_dim)

    @classmethod
    def from_function(cls, domain, codomain, func, strict=True):
        """Matrix of func between two IndexedBasis objects.

        func maps a domain key to a SparseVector over codomain keys. Keys
        outside the codomain raise TruncationExceeded unless strict is False,
        in which case they are dropped.
        """
        columns = [codomain.to_indices(func(key), strict=strict) for key in domain.keys]
        return cls(len(domain), len(codomain), columns)

    @classmethod
    def from_domain_matrix(cls, matrix):
        codomain_dim, domain_dim = matrix.shape
        columns = [SparseVector() for _ in range(domain_dim)]
        for i, row in matrix.to_dod().items():
            for j, value in row.items():
                columns[j].add_term(i, from_qq(value))
        return cls(domain_dim, codomain_dim, columns)

    def to_domain_matrix(self):
        """The same matrix as a sparse DomainMatrix over QQ"""
        rows = {}
        for j, column in enumerate(self.columns):
            for i, value in column.items():
                rows.setdefault(i, {})[j] = to_qq(value)
        return DomainMatrix(rows, (self.codomain_dim, self.domain_dim), QQ)

    def is_empty(self):
        return self.domain_dim == 0 or self.codomain_dim == 0

    def rref(self):
        """(reduced rows as {row: {col: Fraction}}, pivot columns)"""
        if self.is_empty() or self.is_zero():
            return {}, []
        reduced, pivots = self.to_domain_matrix().rref()
        rows = {i: {j: from_qq(v) for j, v in row.items()} for i, row in reduced.to_dod().items()}
        return rows, list(pivots)

    def pivot_columns(self):
        """Columns that are independent of the columns before them"""
        return self.rref()[1]

    def entry(self, row, col):
        return self.columns[col].get(row, Fraction(0))

    def apply(self, vector):
        """Image of an index-keyed vector (dict or dense list)"""
        if isinstance(vector, (list, tuple)):
            if len(vector) != self.domain_dim:
                raise DimensionMismatch(f"vector of length {len(vector)} for domain {self.domain_dim}")
            vector = SparseVector(enumerate(vector))
        result = SparseVector()
        for col, coef in vector.items():
            if not 0 <= col < self.domain_dim:
                raise DimensionMismatch(f"column index {col} outside domain of size {self.domain_dim}")
            result.iadd_coef(coef, self.columns[col])
        return result

    def compose(self, other):
        """Return self o other"""
        if other.codomain_dim != self.domain_dim:
            raise DimensionMismatch(
                f"cannot compose {self.codomain_dim}x{self.domain_dim} after {other.codomain_dim}x{other.domain_dim}")
        return LinearMap(other.domain_dim, self.codomain_dim, [self.apply(col) for col in other.columns])

    def __add__(self, other):
        self._check_same_shape(other)
        return LinearMap(self.domain_dim, self.codomain_dim,
                         [a + b for a, b in zip(self.columns, other.columns)])

    def __sub__(self, other):
        self._check_same_shape(other)
        return LinearMap(self.domain_dim, self.codomain_dim,
                         [a - b for a, b in zip(self.columns, other.columns)])

    def scaled(self, scalar):
        return LinearMap(self.domain_dim, self.codomain_dim, [col.scaled(scalar) for col in self.columns])

    def _check_same_shape(self, other):
        if (self.domain_dim, self.codomain_dim) != (other.domain_dim, other.codomain_dim):
            raise DimensionMismatch("maps of different shapes")

    def transpose(self):
        rows = [SparseVector() for _ in range(self.codomain_dim)]
        for j, column in enumerate(self.columns):
            for i, value in column.items():
                rows[i].add_term(j, value)
        return LinearMap(self.codomain_dim, self.domain_dim, rows)

    def is_zero(self):
        return all(col.is_zero() for col in self.columns)

    def first_nonzero(self):
        """(row, col, value) of the first nonzero entry in column order, or None"""
        for j, column in enumerate(self.columns):
            if column:
                i, value = column.sorted_items()[0]
                return (i, j, value)
        return None

    def rank(self):
        if self.is_empty() or self.is_zero():
            return 0
        return self.to_domain_matrix().rank()

    def kernel(self):
        """Kernel basis, one vector per non-pivot column"""
        if self.domain_dim == 0:
            return []
        if self.codomain_dim == 0 or self.is_zero():
            return [SparseVector({j: 1}) for j in range(self.domain_dim)]
        nullspace = self.to_domain_matrix().nullspace().to_dod()
        return [SparseVector((j, from_qq(v)) for j, v in nullspace[k].items()) for k in sorted(nullspace)]

    def to_dense(self):
        return [[self.entry(i, j) for j in range(self.domain_dim)] for i in range(self.codomain_dim)]

    def to_json(self):
        return [[fraction_to_str(v) for v in row] for row in self.to_dense()]

    def is_invertible(self):
        return self.domain_dim == self.codomain_dim and self.rank() == self.domain_dim

    def inverse(self):
        """Inverse of a square invertible map"""
        if not self.is_invertible():
            raise InconsistentSystem("map is not invertible")
        if self.domain_dim == 0:
            return LinearMap(0, 0)
        return LinearMap.from_domain_matrix(self.to_domain_matrix().inv())

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return (self.domain_dim, self.codomain_dim) == (other.domain_dim, other.codomain_dim) \
            and self.columns == other.columns

    def __repr__(self):
        return f"LinearMap({self.codomain_dim}x{self.domain_dim}, nnz={sum(len(c) for c in self.columns)})"


class IndexedBasis:
    """Ordered list of basis keys with a reverse index"""

    def __init__(self, keys):
        self.keys = list(keys)
        self.index = {key: i for i, key in enumerate(self.keys)}
        if len(self.index) != len(self.keys):
            raise DimensionMismatch("duplicate basis keys")

    def __len__(self):
        return len(self.keys)

    def __contains__(self, key):
        return key in self.index

    def __iter__(self):
        return iter(self.keys)

    def to_indices(self, vector, strict=True):
        """Rewrite a key-labelled vector in index coordinates"""
        result = SparseVector()
        for key, value in vector.items():
            position = self.index.get(key)
            if position is None:
                if strict:
                    raise TruncationExceeded(f"basis element {key!r} outside the window")
                continue
            result.add_term(position, value)
        return result

    def to_keys(self, vector):
        """Rewrite an index vector with basis keys"""
        return SparseVector((self.keys[i], v) for i, v in vector.items())


class ColumnSpan:
    """Coordinates with respect to a list of linearly independent vectors.

    The row reduction of the transpose picks rows on which the vectors form
    an invertible square block; a lookup is one product with its inverse and
    a check that the combination reproduces the vector.
    """

    def __init__(self, vectors, dim):
        self.matrix = LinearMap(len(vectors), dim, list(vectors))
        rows = self.matrix.transpose().pivot_columns()
        if len(rows) != len(vectors):
            raise DimensionMismatch(f"{len(vectors)} vectors span only {len(rows)} dimensions")
        self.rows = {i: k for k, i in enumerate(rows)}
        block = [SparseVector((self.rows[i], v) for i, v in column.items() if i in self.rows)
                 for column in self.matrix.columns]
        self._inverse = LinearMap(len(rows), len(rows), block).inverse()

    def __len__(self):
        return self.matrix.domain_dim

    def coordinates(self, vector):
        """Coefficients c with sum c_j v_j = vector, or None off the span"""
        restricted = SparseVector((self.rows[i], v) for i, v in vector.items() if i in self.rows)
        coefficients = self._inverse.apply(restricted)
        if self.matrix.apply(coefficients) != vector:
            return None
        return coefficients


@dataclass
class SolveResult:
    """Outcome of solve: a solution or an inconsistency certificate"""
    solution: SparseVector = None
    certificate: SparseVector = None

    @property
    def consistent(self):
        return self.solution is not None


def solve(linear_map, rhs):
    """Solve map(x) = rhs exactly.

    Free variables are zero: the reduced echelon form of [map | rhs] is read
    off at the pivot columns. When no solution exists the certificate y
    satisfies y.map = 0 and y.rhs != 0.
    """
    if isinstance(rhs, (list, tuple)):
        if len(rhs) != linear_map.codomain_dim:
            raise DimensionMismatch(f"rhs of length {len(rhs)} for codomain {linear_map.codomain_dim}")
        rhs = SparseVector(enumerate(rhs))
    for row in rhs:
        if not 0 <= row < linear_map.codomain_dim:
            raise DimensionMismatch(f"rhs index {row} outside codomain {linear_map.codomain_dim}")
    n = linear_map.domain_dim
    augmented = LinearMap(n + 1, linear_map.codomain_dim, linear_map.columns + [rhs])
    rows, pivots = augmented.rref()
    if n not in pivots:
        return SolveResult(solution=SparseVector((p, rows[i].get(n, 0)) for i, p in enumerate(pivots)))
    for y in linear_map.transpose().kernel():
        if y.dot(rhs) != 0:
            logging.debug(f"solve: inconsistent system, certificate support {len(y)}")
            return SolveResult(certificate=y)
    raise InconsistentSystem("no certificate found for an inconsistent system")


def solve_strict(linear_map, rhs):
    """solve() that raises InconsistentSystem instead of returning a certificate"""
    result = solve(linear_map, rhs)
    if not result.consistent:
        raise InconsistentSystem("linear system has no solution", certificate=result.certificate)
    return result.solution


@dataclass
class HomologyBasis:
    """Homology of C_in -> C_mid -> C_out at the middle spot"""
    dim: int
    representatives: list
    cycles_dim: int
    boundary_rank: int
    _span: ColumnSpan = field(repr=False, default=None)
    _d_in: LinearMap = field(repr=False, default=None)

    def coordinates(self, cycle):
        """Coordinates of a cycle's class in the representative basis"""
        combination = self._span.coordinates(cycle)
        if combination is None:
            raise NotAComplex("vector is not a cycle of this complex", entry=cycle.sorted_items()[0])
        return SparseVector((j - self.boundary_rank, v) for j, v in combination.items()
                            if j >= self.boundary_rank)

    def is_boundary(self, cycle):
        return self.coordinates(cycle).is_zero()

    def boundary_preimage(self, cycle):
        """Some x with d_in(x) = cycle, for a boundary"""
        return solve_strict(self._d_in, cycle)


def check_complex(d_in, d_out):
    """Raise unless d_out o d_in is defined and zero"""
    if d_in.codomain_dim != d_out.domain_dim:
        raise DimensionMismatch(
            f"non-composable differentials: {d_in.codomain_dim} vs {d_out.domain_dim}")
    composite = d_out.compose(d_in)
    entry = composite.first_nonzero()
    if entry is not None:
        raise NotAComplex(f"d_out o d_in has nonzero entry at {entry[:2]}", entry=entry)


def homology(d_in, d_out):
    """Homology basis of the complex d_in, d_out at the middle spot"""
    check_complex(d_in, d_out)
    boundaries = [d_in.columns[k] for k in d_in.pivot_columns()]
    cycles = d_out.kernel()
    combined = LinearMap(len(boundaries) + len(cycles), d_in.codomain_dim, boundaries + cycles)
    offset = len(boundaries)
    representatives = [cycles[k - offset] for k in combined.pivot_columns() if k >= offset]
    logging.debug(f"homology: cycles {len(cycles)}, boundaries {offset}, dim {len(representatives)}")
    return HomologyBasis(
        dim=len(representatives),
        representatives=representatives,
        cycles_dim=len(cycles),
        boundary_rank=offset,
        _span=ColumnSpan(boundaries + representatives, d_in.codomain_dim),
        _d_in=d_in,
    )


def induced_on_homology(f, source, target, f_prev=None, f_next=None):
    """Matrix of the map induced by f between two homology groups.

    source and target are (d_in, d_out) pairs. When the neighbouring
    components f_prev / f_next are given the two chain-map squares are
    checked entrywise; otherwise f is checked to send cycles to cycles and
    boundaries to boundaries.
    """
    s_in, s_out = source
    t_in, t_out = target
    if f.domain_dim != s_in.codomain_dim or f.codomain_dim != t_in.codomain_dim:
        raise DimensionMismatch("f does not fit between the middle spaces")
    if f_next is not None:
        difference = t_out.compose(f) - f_next.compose(s_out)
        entry = difference.first_nonzero()
        if entry is not None:
            raise NotAChainMap(f"d o f != f o d at {entry[:2]}", entry=entry)
    if f_prev is not None:
        difference = f.compose(s_in) - t_in.compose(f_prev)
        entry = difference.first_nonzero()
        if entry is not None:
            raise NotAChainMap(f"f o d != d o f at {entry[:2]}", entry=entry)
    source_h = homology(s_in, s_out)
    target_h = homology(t_in, t_out)
    if f_next is None:
        for z in source_h.representatives:
            image = t_out.apply(f.apply(z))
            if not image.is_zero():
                raise NotAChainMap("f sends a cycle to a non-cycle", entry=image.sorted_items()[0])
    if f_prev is None:
        for column in s_in.columns:
            image = f.apply(column)
            if not target_h.is_boundary(image):
                raise NotAChainMap("f sends a boundary to a nontrivial class")
    columns = [target_h.coordinates(f.apply(z)) for z in source_h.representatives]
    return LinearMap(source_h.dim, target_h.dim, columns)


def key_to_json(key):
    """Nested tuples -> nested lists"""
    if isinstance(key, tuple):
        return [key_to_json(k) for k in key]
    return key


def vector_to_json(vector):
    """Sorted [[key, "p/q"], ...] listing of a SparseVector"""
    return [[key_to_json(k), fraction_to_str(v)] for k, v in vector.sorted_items()]

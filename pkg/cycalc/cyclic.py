"""Calculus Engine - Cyclic Complexes

Negative, ordinary and periodic cyclic complexes of normalized chains. An
element is a u-series, a SparseVector keyed by ``(p, t)`` standing for
u^p t; its homological degree is arity(t) - 2p. The differential is b + uB
with powers of u above the window dropped.
"""
import logging
from dataclasses import dataclass

from .calculus import ChainWindow, op_B, op_b, u_coefficient, u_operator, u_shift
from .constants import DEFAULT_U_BOUND, DEFAULT_U_NEG_BOUND
from .errors import ConfigError, StabilizationError
from .exactla import IndexedBasis, LinearMap, homology, induced_on_homology

NEGATIVE = 'negative'
ORDINARY = 'ordinary'
PERIODIC = 'periodic'
MODES = (NEGATIVE, ORDINARY, PERIODIC)


@dataclass
class CyclicHomology:
    """Homology of one (degree, weight) block of a cyclic complex"""
    mode: str
    degree: int
    weight: int
    basis: object
    stable: bool
    reliable: bool = True

    @property
    def dim(self):
        return self.basis.dim

    def to_json(self):
        return {
            'degree': self.degree,
            'weight': self.weight,
            'dim': self.dim,
            'stable': self.stable and self.reliable,
        }


class CyclicWindow:
    """b + uB on u-series of window chains.

    negative keeps 0 <= p <= U, ordinary keeps p <= 0 with u.u^0 = 0 and
    periodic keeps -P <= p <= U.
    """

    def __init__(self, algebra, mode=NEGATIVE, u_bound=DEFAULT_U_BOUND, u_neg_bound=DEFAULT_U_NEG_BOUND,
                 chain_window=None):
        if mode not in MODES:
            raise ConfigError(f"unknown cyclic mode: {mode}")
        if u_bound < 0 or u_neg_bound < 0:
            raise ConfigError("u bounds must be non-negative")
        self.algebra = algebra
        self.mode = mode
        self.u_bound = u_bound
        self.u_neg_bound = u_neg_bound
        self.chains = chain_window or ChainWindow(algebra)
        self.upper = 0 if mode == ORDINARY else u_bound
        self.differential = u_operator({0: op_b(algebra), 1: op_B(algebra)}, upper=self.upper, degree=1)
        self._bases = {}
        self._matrices = {}

    def enlarged(self):
        """The same window with U and P raised by one"""
        return CyclicWindow(self.algebra, self.mode, self.u_bound + 1, self.u_neg_bound + 1, self.chains)

    def powers(self, degree):
        if self.mode == NEGATIVE:
            return range(0, self.u_bound + 1)
        if self.mode == ORDINARY:
            return range(-(max(degree, 0) // 2 + 1), 1)
        return range(-self.u_neg_bound, self.u_bound + 1)

    def basis(self, degree, weight):
        key = (degree, weight)
        if key not in self._bases:
            keys = []
            for p in self.powers(degree):
                n = degree + 2 * p
                if n < 0:
                    continue
                keys.extend((p, t) for t in self.chains.tensors(n, weight))
            self._bases[key] = IndexedBasis(sorted(keys))
        return self._bases[key]

    def matrix(self, degree, weight):
        """b + uB from homological degree `degree` to degree - 1"""
        key = (degree, weight)
        if key not in self._matrices:
            domain, codomain = self.basis(degree, weight), self.basis(degree - 1, weight)
            self._matrices[key] = self.differential.matrix(domain, codomain, strict=self.algebra.is_graded)
        return self._matrices[key]

    def reliable(self, degree):
        """Finite algebras lose chains above arity N, so only low degrees are exact"""
        if self.algebra.is_graded:
            return True
        return degree <= self.chains.arity_bound - 2

    def homology(self, degree, weight):
        return homology(self.matrix(degree + 1, weight), self.matrix(degree, weight))

    def check_complex(self, degree, weight):
        composite = self.matrix(degree, weight).compose(self.matrix(degree + 1, weight))
        return composite.first_nonzero() is None


def cyclic_homology(window, degree, weight):
    """Homology at (degree, weight) with the U/P stabilization flag"""
    basis = window.homology(degree, weight)
    if window.mode == ORDINARY:
        stable = True
    else:
        stable = window.enlarged().homology(degree, weight).dim == basis.dim
    if not stable:
        logging.warning(f"{window.mode} cyclic homology in degree {degree}, weight {weight} "
                        f"not stable at U={window.u_bound}, P={window.u_neg_bound}")
    return CyclicHomology(window.mode, degree, weight, basis, stable, window.reliable(degree))


def pi(series):
    """u^0 coefficient of a negative cyclic chain"""
    return u_coefficient(series, 0)


def multiply_by_u(series, upper):
    return u_shift(series, 1, upper)


def pi_matrix(window, degree, weight):
    """pi as a matrix from CC^- in this degree to chains of arity `degree`"""
    domain = window.basis(degree, weight)
    codomain = IndexedBasis(window.chains.tensors(degree, weight))
    columns = []
    for p, t in domain.keys:
        columns.append(codomain.to_indices({t: 1}) if p == 0 else {})
    return LinearMap(len(domain), len(codomain), columns)


def pi_on_homology(window, degree, weight):
    """Map HC^-_degree -> HH_degree induced by pi"""
    if window.mode != NEGATIVE:
        raise ConfigError("pi is defined on the negative cyclic complex")
    chains = window.chains
    source = (window.matrix(degree + 1, weight), window.matrix(degree, weight))
    target = (chains.b_matrix(degree + 1, weight), chains.b_matrix(degree, weight))
    f = pi_matrix(window, degree, weight)
    f_prev = pi_matrix(window, degree + 1, weight)
    f_next = pi_matrix(window, degree - 1, weight)
    return induced_on_homology(f, source, target, f_prev=f_prev, f_next=f_next)


def _periodic_class(periodic, series, degree, weight):
    basis = periodic.basis(degree, weight)
    return periodic.homology(degree, weight).coordinates(basis.to_indices(series))


def to_periodic(series, degree, weight, negative_window):
    """Coordinates of the periodic class of a negative cyclic cycle.

    The answer is checked against the window with one more negative power of
    u; a disagreement raises StabilizationError.
    """
    periodic = CyclicWindow(negative_window.algebra, PERIODIC, negative_window.u_bound,
                            negative_window.u_neg_bound, negative_window.chains)
    larger = CyclicWindow(negative_window.algebra, PERIODIC, negative_window.u_bound,
                          negative_window.u_neg_bound + 1, negative_window.chains)
    coordinates = _periodic_class(periodic, series, degree, weight)
    check = _periodic_class(larger, series, degree, weight)
    if coordinates.is_zero() != check.is_zero():
        raise StabilizationError(
            f"periodic class in degree {degree}, weight {weight} changes with P; increase P/U")
    return coordinates


def is_zero_in_periodic(series, degree, weight, negative_window):
    return to_periodic(series, degree, weight, negative_window).is_zero()


def betti_table(algebra, mode, degrees, weights, u_bound=DEFAULT_U_BOUND, u_neg_bound=DEFAULT_U_NEG_BOUND):
    """Dimensions of the cyclic homology of every (degree, weight) pair"""
    window = CyclicWindow(algebra, mode, u_bound, u_neg_bound)
    entries = [cyclic_homology(window, i, w).to_json() for w in weights for i in degrees]
    logging.info(f"{mode} cyclic homology of {algebra.name}: {len(entries)} blocks")
    return {
        'algebra': algebra.name,
        'mode': mode,
        'window': {'W': window.chains.weight_bound, 'N': window.chains.arity_bound, 'U': u_bound,
                   'P': u_neg_bound},
        'entries': entries,
    }


def exact_sequence_check(algebra, weight, degrees, u_bound=DEFAULT_U_BOUND, u_neg_bound=DEFAULT_U_NEG_BOUND):
    """Dimension consistency of HC_{n-1} -> HC^-_n -> HC^per_n -> HC_{n-2} -> HC^-_{n-1}.

    Exactness at a term forces its dimension to be at most the sum of its
    neighbours; every violation is returned as (n, term).
    """
    windows = {mode: CyclicWindow(algebra, mode, u_bound, u_neg_bound) for mode in MODES}

    def dim(mode, n):
        return windows[mode].homology(n, weight).dim

    violations = []
    for n in degrees:
        hc_prev, neg, per, hc_two, neg_prev = (dim(ORDINARY, n - 1), dim(NEGATIVE, n), dim(PERIODIC, n),
                                               dim(ORDINARY, n - 2), dim(NEGATIVE, n - 1))
        if neg > hc_prev + per:
            violations.append((n, 'negative'))
        if per > neg + hc_two:
            violations.append((n, 'periodic'))
        if hc_two > per + neg_prev:
            violations.append((n, 'ordinary'))
    return violations


def vanishing_violations(algebra, dimension, weights, degrees):
    """Degrees above d where HH_i or HC^-_i is nonzero"""
    chains = ChainWindow(algebra)
    negative = CyclicWindow(algebra, NEGATIVE)
    found = []
    for w in weights:
        for i in degrees:
            if i > dimension and chains.hochschild_homology(i, w).dim:
                found.append(('HH', i, w))
            if i > dimension and negative.homology(i, w).dim:
                found.append(('HC-', i, w))
    return found

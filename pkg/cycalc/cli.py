"""
Calculus Engine - Command Line Driver

Every verification suite as a subcommand; reports are JSON with sorted
keys so that the same configuration and seed give byte-identical output.
"""
import argparse
import json
import logging
from dataclasses import dataclass

from .algebra import algebra_from_json, catalog
from .calculus import ChainWindow, make_rng, u_series
from .commutative import BVMinus, PolyCalculus, VolumeForm, comparison_dglas, verify_hkr
from .constants import (
    CATALOG_CY_DIMENSION, DEFAULT_ARITY_BOUND, DEFAULT_ARITY_K, DEFAULT_SEED, DEFAULT_TRIALS, DEFAULT_U_BOUND,
    DEFAULT_U_NEG_BOUND, DEFAULT_WEIGHT_BOUND, EXIT_ASSERTION_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, LOG_DATEFMT,
    LOG_FORMAT, RANDOM_COEFFICIENTS, SCHEMA_VERSION,
)
from .cyclic import MODES, NEGATIVE, ORDINARY, CyclicWindow, betti_table, exact_sequence_check, pi_on_homology, \
    vanishing_violations
from .cydeform import (
    CyclicComparison, DefFlatEquivalence, DeformationDGLA, forget_failures, obstruction_periodic_image,
)
from .duality import CYStructure, Duality, catalog_structure
from .errors import CalculusError, ConfigError, InconsistentSystem, TruncationExceeded
from .exactla import SparseVector
from .homotopy import verify_identities
from .linfty import bvminus_check, homotopy_abelian_psi, series_comparison_report
from .mc import extend_mc, gauge, is_mc, morphism_failures, random_r_element
from .testring import RElement, ring_from_json, truncated_polynomial, truncation_extension

# Q[e]/(e^n) rings the deformation suite runs over
DEFORMATION_RINGS = (2, 3, 4)
# largest target weight of the Psi blocks and of the bracket comparison blocks
PSI_MAX_WEIGHT = 4
BRACKET_MAX_WEIGHT = 3
# D-degree of the compared classes; Psi sends them to HC^-_{d-1}
BRACKET_DEGREE = 0


@dataclass
class ScenarioConfig:
    """One run of the driver: the algebra, its window and the sampling budget"""
    algebra: str = None
    spec: str = None
    weight_bound: int = DEFAULT_WEIGHT_BOUND
    arity_bound: int = DEFAULT_ARITY_BOUND
    u_bound: int = DEFAULT_U_BOUND
    u_neg_bound: int = DEFAULT_U_NEG_BOUND
    arity_k: int = DEFAULT_ARITY_K
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    eta: str = 'catalog'
    out: str = None

    def validate(self):
        if (self.algebra is None) == (self.spec is None):
            raise ConfigError("give exactly one of --algebra and --spec")
        for name in ('weight_bound', 'arity_bound', 'u_bound', 'u_neg_bound', 'arity_k', 'trials'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.seed is None:
            raise ConfigError("randomized suites need a seed")
        if self.eta not in ('catalog', 'zero'):
            raise ConfigError(f"unknown eta choice: {self.eta}")
        return self

    @property
    def window(self):
        return {'W': self.weight_bound, 'N': self.arity_bound, 'U': self.u_bound, 'P': self.u_neg_bound,
                'K': self.arity_k}

    def _spec_data(self):
        try:
            with open(self.spec) as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read algebra spec {self.spec}: {e}")

    def load_algebra(self):
        if self.algebra is not None:
            return catalog(self.algebra, weight_bound=self.weight_bound, arity_bound=self.arity_bound)
        return algebra_from_json(self._spec_data())

    def coefficient_rings(self):
        """Q[e]/(e^n) for the built-in orders, plus the spec file's own ring"""
        rings = [truncated_polynomial(n) for n in DEFORMATION_RINGS]
        if self.spec is not None:
            data = self._spec_data()
            if 'test_ring' in data:
                rings.append(ring_from_json(data['test_ring']))
        return rings


def structure_for(algebra):
    """Catalog Calabi-Yau structure, or the unit in degree 0 for any other algebra"""
    if algebra.name in CATALOG_CY_DIMENSION:
        return catalog_structure(algebra)
    return CYStructure(algebra, 0, u_series(SparseVector({(algebra.unit,): 1})))


def polynomial_calculus(algebra):
    if algebra.exponents is None or not algebra.n_vars:
        raise ConfigError(f"{algebra.name} is not a polynomial algebra in at least one variable")
    return PolyCalculus(algebra.n_vars)


def run_homology(config, algebra):
    weights = ChainWindow(algebra).weights()
    hochschild = ChainWindow(algebra)
    tables = {'hochschild': [{'degree': i, 'weight': w, 'dim': hochschild.hochschild_homology(i, w).dim}
                             for w in weights for i in range(config.arity_bound + 1)]}
    for mode in MODES:
        low = 0 if mode == ORDINARY else -2 * config.u_bound
        table = betti_table(algebra, mode, range(low, config.arity_bound + 1), weights,
                            config.u_bound, config.u_neg_bound)
        tables[mode] = table['entries']
    violations = [{'weight': w, 'degree': n, 'term': term} for w in weights
                  for n, term in exact_sequence_check(algebra, w, range(-2, config.arity_bound),
                                                      config.u_bound, config.u_neg_bound)]
    return {'tables': tables, 'exact_sequence_violations': violations, 'ok': not violations}


def run_identities(config, algebra):
    report = verify_identities(algebra, seed=config.seed, count=config.trials,
                               lemma_trials=max(1, config.trials // 4)).to_json()
    report['ok'] = report['passed']
    return report


def run_cy_check(config, algebra):
    structure = structure_for(algebra)
    if config.eta == 'zero':
        structure = CYStructure(algebra, structure.dimension, SparseVector())
    d = structure.dimension
    duality = Duality(structure, weight_bound=config.weight_bound).report()
    weights = ChainWindow(algebra).weights()
    vanishing = [list(v) for v in vanishing_violations(algebra, d, weights, range(0, d + 3))]
    window = CyclicWindow(algebra, NEGATIVE, config.u_bound, config.u_neg_bound)
    pi_blocks = [{'degree': d, 'weight': w, 'invertible': pi_on_homology(window, d, w).is_invertible()}
                 for w in weights]
    ok = duality['nondegenerate'] and not vanishing and all(b['invertible'] for b in pi_blocks)
    return {'duality': duality, 'vanishing_violations': vanishing, 'pi_top_degree': pi_blocks, 'ok': ok}


def _random_combination(rng, vectors, terms=2):
    result = SparseVector()
    for v in rng.sample(vectors, min(terms, len(vectors))):
        result.iadd_coef(rng.choice(RANDOM_COEFFICIENTS), v)
    return result


def first_order_classes(D, pieces):
    """Representatives of H^1(D) on the given pieces"""
    classes = []
    for piece in pieces:
        basis, mid = D.cohomology(1, piece)
        classes.extend(mid.to_keys(z) for z in basis.representatives)
    return classes


def mc_samples(D, ring, rng, classes):
    """A point of the gauge orbit of 0 and, over Q[e]/(e^n), one built order by order from H^1"""
    samples = [gauge(D, random_r_element(D, ring, rng, 0), RElement(ring))]
    if classes and ring.order == tuple(range(ring.dim)):
        try:
            samples.append(extend_mc(D, _random_combination(rng, classes), ring))
        except (InconsistentSystem, TruncationExceeded) as e:
            logging.info(f"no order by order element of {D.name} over {ring.name}: {e}")
    return samples


def _socle_index(ring):
    for i in ring.m_basis:
        if all(not ring.multiply(i, j) for j in ring.m_basis):
            return i
    raise ConfigError(f"{ring.name} has no socle element")


def perturbed_mc(D, ring, rng, y, attempts=10):
    """y + s z with s in the socle of R and dz != 0, never Maurer-Cartan; None if no such z is drawn"""
    for _ in range(attempts):
        z = D.random_element(rng, 1)
        if not D.d(z).is_zero():
            return y + RElement(ring, {_socle_index(ring): z})
    return None


def run_deform(config, algebra):
    D = DeformationDGLA(structure_for(algebra), u_bound=config.u_bound)
    phi = DefFlatEquivalence(D)
    rng = make_rng(config.seed)
    axioms = D.structure_failures(rng, config.trials)
    forgetful = len(forget_failures(D, rng, config.trials))
    classes = first_order_classes(D, D.pieces(1))
    rings = []
    for ring in config.coefficient_rings():
        counts = {'objects': 0, 'object_round_trip': 0, 'morphisms': 0, 'morphism_round_trip': 0,
                  'functoriality': 0, 'non_mc_accepted': 0, 'mc_criterion': 0}
        built = 0
        perturbed = 0
        for _ in range(config.trials):
            samples = mc_samples(D, ring, rng, classes)
            built += len(samples) - 1
            for y in samples:
                obj = phi.on_object(y)
                counts['objects'] += bool(obj.violations())
                counts['object_round_trip'] += phi.object_preimage(obj) != y
                x1, x2 = (random_r_element(D, ring, rng, 0) for _ in range(2))
                morphism = phi.on_morphism(x1, y)
                counts['morphisms'] += bool(morphism.violations())
                counts['morphism_round_trip'] += phi.morphism_preimage(morphism) != x1
                counts['functoriality'] += bool(phi.functoriality_failures(x1, x2, y))
            candidate = random_r_element(D, ring, rng, 1)
            counts['mc_criterion'] += is_mc(D, candidate) != (phi.on_object(candidate).violations() == [])
            candidate = perturbed_mc(D, ring, rng, samples[-1])
            if candidate is not None:
                perturbed += 1
                mc = is_mc(D, candidate)
                counts['mc_criterion'] += mc != (phi.on_object(candidate).violations() == [])
                counts['non_mc_accepted'] += mc
        rings.append({'ring': ring.to_json(), 'trials': config.trials, 'built_order_by_order': built,
                      'perturbed_candidates': perturbed, 'failures': counts})
    ok = not axioms and not forgetful and not any(any(r['failures'].values()) for r in rings)
    return {'dgla': D.name, 'dimension': D.dimension, 'axiom_failures': axioms, 'first_order_classes': len(classes),
            'forget_failures': forgetful, 'rings': rings, 'ok': ok}


def _comparison(config, algebra, **options):
    return CyclicComparison(DeformationDGLA(structure_for(algebra), u_bound=config.u_bound, **options))


def run_psi(config, algebra):
    comparison = _comparison(config, algebra, lowest_degree=-2, all_shifts=True)
    degrees = comparison.window_degrees()
    pieces = comparison.window_pieces(PSI_MAX_WEIGHT)
    rng = make_rng(config.seed)
    residuals = 0
    for degree in degrees:
        for _ in range(config.trials):
            z = comparison.D.random_piece_element(rng, degree, pieces)
            residuals += not comparison.residual(z).is_zero()
    report = comparison.verify_quasi_iso(degrees, pieces)
    report['chain_map_failures'] = residuals
    report['ok'] = report['ok'] and not residuals
    return report


def run_menichi(config, algebra):
    comparison = _comparison(config, algebra)
    pieces = comparison.window_pieces(BRACKET_MAX_WEIGHT, closed=True)
    report = comparison.compare_brackets([(BRACKET_DEGREE, piece) for piece in pieces])
    report['nonzero_pairs'] = sum(1 for pair in report['pairs'] if pair['relation'] != 0)
    report['ok'] = report['consistent']
    return report


def run_obstruction(config, algebra):
    comparison = _comparison(config, algebra)
    D = comparison.D
    classes = first_order_classes(D, D.pieces(1))
    if not classes:
        logging.warning(f"{D.name} has no first order classes in the window")
    rng = make_rng(config.seed)
    images = []
    for trial in range(config.trials if classes else 0):
        ext = truncation_extension(2 + trial % 2)
        try:
            x = extend_mc(D, _random_combination(rng, classes), ext.target)
        except (InconsistentSystem, TruncationExceeded):
            logging.info(f"order {ext.target.dim - 1} is already obstructed; skipped")
            continue
        image = obstruction_periodic_image(comparison, x, ext)
        images.append(dict(image.to_json(), order=ext.target.dim, cocycle_zero=image.cocycle.is_zero()))
    return {'first_order_classes': len(classes), 'images': images,
            'nonzero_cocycles': sum(1 for image in images if not image['cocycle_zero']),
            'ok': all(image['zero'] for image in images)}


def run_commutative(config, algebra):
    calc = polynomial_calculus(algebra)
    volume = VolumeForm.standard(calc)
    rng = make_rng(config.seed)
    counts = {'divergence_squared': 0, 'schechtman': 0}
    for _ in range(config.trials):
        gamma = calc.random_element(rng, rng.choice(range(1, calc.n_vars + 1)))
        twice = volume.divergence(volume.divergence(gamma))
        counts['divergence_squared'] += not calc.truncated(twice, volume.exact_degree(2)).is_zero()
        g1, g2 = (calc.random_element(rng, rng.choice(range(calc.n_vars + 1))) for _ in range(2))
        counts['schechtman'] += not volume.schechtman_defect(g1, g2).is_zero()
    bv = BVMinus(volume, config.u_bound)
    bv_report = bvminus_check(bv, rng, config.trials, project=bv.exact)
    source, target, f = comparison_dglas(volume, u_bound=config.u_bound)
    delta_prime_failures = len(morphism_failures(source, target, f, rng, config.trials))
    hkr = verify_hkr(algebra)
    ok = not any(counts.values()) and bv_report['ok'] and not delta_prime_failures and hkr['ok']
    return {'failures': counts, 'bv_minus': bv_report, 'delta_prime_failures': delta_prime_failures,
            'hkr': hkr, 'ok': ok}


def run_linfty(config, algebra):
    bv = BVMinus(VolumeForm.standard(polynomial_calculus(algebra)), config.u_bound, sample_degree=1)
    rng = make_rng(config.seed)
    bv_report = bvminus_check(bv, rng, config.trials, project=bv.exact)
    psi = homotopy_abelian_psi(bv, config.arity_k).report(rng, config.trials, degrees=(0, 1))
    series = series_comparison_report(bv, rng, config.trials, config.arity_k)
    return {'bv_minus': bv_report, 'homotopy_abelian': psi, 'series_to_semidirect': series,
            'ok': bv_report['ok'] and psi['ok'] and series['ok']}


SUBCOMMANDS = {
    'homology': run_homology,
    'identities': run_identities,
    'cy-check': run_cy_check,
    'deform': run_deform,
    'psi': run_psi,
    'menichi': run_menichi,
    'obstruction': run_obstruction,
    'commutative': run_commutative,
    'linfty': run_linfty,
}


def run(subcommand, config):
    """(exit code, report) for one subcommand"""
    report = {'schema_version': SCHEMA_VERSION, 'subcommand': subcommand, 'window': config.window,
              'seed': config.seed, 'trials': config.trials}
    try:
        if subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand: {subcommand}")
        config.validate()
        algebra = config.load_algebra()
        report['algebra'] = algebra.name
        logging.info(f"running {subcommand} on {algebra.name} with window {config.window}, seed {config.seed}")
        result = SUBCOMMANDS[subcommand](config, algebra)
    except (ConfigError, TruncationExceeded) as e:
        logging.error(f"configuration error in {subcommand}: {e}")
        report.update({'ok': False, 'error': str(e), 'error_type': type(e).__name__})
        return EXIT_CONFIG_ERROR, report
    except CalculusError as e:
        logging.error(f"{subcommand} failed: {e}", exc_info=True)
        report.update({'ok': False, 'error': str(e), 'error_type': type(e).__name__,
                       'counterexample': getattr(e, 'entry', None) or getattr(e, 'witness', None)})
        return EXIT_ASSERTION_FAILED, report
    report['result'] = result
    report['ok'] = bool(result['ok'])
    if not report['ok']:
        logging.warning(f"{subcommand} on {algebra.name}: assertions failed")
    return (EXIT_OK if report['ok'] else EXIT_ASSERTION_FAILED), report


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, default=str)


def build_parser():
    parser = argparse.ArgumentParser(description='Exact Hochschild and cyclic calculus checks')
    parser.add_argument('subcommand', choices=sorted(SUBCOMMANDS), help='Suite to run')
    parser.add_argument('--algebra', help='Catalog algebra name (Q, K2, T2, Q[x], Q[x,y], Q[x,y,z], Q[x]/(x^n))')
    parser.add_argument('--spec', help='Algebra spec JSON file')
    parser.add_argument('--weight-bound', type=int, default=DEFAULT_WEIGHT_BOUND, help='Largest stored weight W')
    parser.add_argument('--arity-bound', type=int, default=DEFAULT_ARITY_BOUND,
                        help='Largest chain arity N for finite algebras')
    parser.add_argument('--u-bound', type=int, default=DEFAULT_U_BOUND, help='Largest power of u kept')
    parser.add_argument('--u-neg-bound', type=int, default=DEFAULT_U_NEG_BOUND,
                        help='Largest power of u^-1 kept in periodic chains')
    parser.add_argument('--arity-k', type=int, default=DEFAULT_ARITY_K, help='L-infinity arity bound K')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help=f'Random seed (default: {DEFAULT_SEED})')
    parser.add_argument('--trials', type=int, default=DEFAULT_TRIALS, help='Samples per randomized check')
    parser.add_argument('--eta', choices=('catalog', 'zero'), default='catalog',
                        help='Calabi-Yau cycle used by cy-check')
    parser.add_argument('--out', help='Write the JSON report here instead of stdout')
    parser.add_argument('--log-file', default='cycalc.log', help='Log file (default: cycalc.log)')
    parser.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        filename=args.log_file,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT
    )
    options = vars(args)
    subcommand = options.pop('subcommand')
    options.pop('log_file')
    options.pop('verbose')
    config = ScenarioConfig(**options)
    code, report = run(subcommand, config)
    text = dumps(report)
    if config.out:
        with open(config.out, 'w') as f:
            f.write(text + '\n')
        print(f"{subcommand}: {'ok' if report['ok'] else 'FAILED'}, report written to {config.out}")
    else:
        print(text)
    return code



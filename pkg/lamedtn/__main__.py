"""
Batch front end: python -m lamedtn MODE --config PATH [--out DIR] [--verbose]
"""
from argparse import ArgumentParser
import functools
import logging
import multiprocessing
import sys
import time

import numpy as np

from lamedtn.config import ExperimentConfig, MODES, base_value
from lamedtn.dtn import oracle_from_groundtruth
from lamedtn.errors import ConfigError, LameError
from lamedtn.recovery import normal_determinant, recover_all
from lamedtn.report import Report, expansion_record, recovery_record
from lamedtn.samples import random_collar, random_coefficient_terms, random_covector
from lamedtn.validation import halfspace_agreement, halving_check, recovery_errors, remainder_table, \
    scaling_defect, symbol_diagnostics, true_normal_derivatives


def _parallel(function, items, jobs):
    """
    Apply C{function} to every item, in a pool of C{jobs} processes when C{jobs > 1}; results keep the input order
    """
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            results = [pool.apply_async(function, args=(item,)) for item in items]
            return [result.get() for result in results]
    return [function(item) for item in items]


def _worst(values):
    return max(values, default=0.)


def _collect(worst, diagnostics):
    """
    Fold one collar's diagnostics into running maxima
    """
    for key, value in diagnostics.items():
        if key == 'full_symbol':
            for degree, residual in value.items():
                name = f'full_symbol_{degree}'
                worst[name] = max(worst.get(name, 0.), residual)
        elif key == 'min_eigenvalue':
            worst[key] = min(worst.get(key, np.inf), value)
        else:
            worst[key] = max(worst.get(key, 0.), value)


def _structure_checks(report, worst, tolerances):
    report.check('principal_identity', worst['principal_identity'], tolerances['identity'])
    report.check('sylvester', worst['sylvester'], tolerances['two_route'])
    report.check('two_route_p1', worst['two_route'], tolerances['two_route'])
    report.check('hermitian', worst['hermitian'], tolerances['identity'])
    report.check('positive', worst['min_eigenvalue'], 0., passed=bool(worst['min_eigenvalue'] > 0))
    report.check('homogeneity', worst['homogeneity'], tolerances['homogeneity'])
    for name in sorted(worst):
        if name.startswith('full_symbol_'):
            report.check(name, worst[name], tolerances['residual'])


def run_symbols(config, report):
    records = []
    worst = {}
    for index, xi in enumerate(config.xi):
        try:
            collar = config.collar(xi)
            q, p, diagnostics = symbol_diagnostics(collar, config.depth)
            diagnostics['scaling'] = scaling_defect(collar, config.depth)
        except LameError as error:
            report.error(f'xi[{index}]', error)
            continue
        _collect(worst, diagnostics)
        records.append({'xi': xi, 'q': expansion_record(q), 'p': expansion_record(p, config.base_point),
                        'diagnostics': diagnostics})
    report.body['expansions'] = records
    if worst:
        _structure_checks(report, worst, config.tolerances)
        report.check('scaling', worst['scaling'], config.tolerances['homogeneity'])


def _recover_at(config, xi):
    collar = config.collar(xi)
    oracle = oracle_from_groundtruth(collar, config.depth)
    return recover_all(oracle, collar.metric, config.m_max, xi)


def run_recover(config, report):
    truth = true_normal_derivatives(config.collar(), config.m_max)
    recoveries = _parallel(functools.partial(_recover_at, config), config.xi, config.jobs)
    report.body['truth'] = {'lam': truth[0], 'mu': truth[1]}
    report.body['recoveries'] = [recovery_record(recovery, truth) for recovery in recoveries]
    for index, recovery in enumerate(recoveries):
        if recovery.failed_order is not None:
            report.errors.append({'where': f'xi[{index}]', 'type': 'RecoveryFailure',
                                  'message': f'order {recovery.failed_order}: {recovery.error}'})
    report.check('recovery', _worst(recovery_errors(recovery, truth) for recovery in recoveries),
                 config.tolerances['recovery'])
    spread = 0.
    for found in zip(*(recovery.values()[0]+recovery.values()[1] for recovery in recoveries)):
        spread = max(spread, (max(found)-min(found))/max(max(abs(value) for value in found), 1.))
    report.check('independence', spread, config.tolerances['independence'])


def run_halfspace(config, report):
    rng = np.random.default_rng(config.seed)
    pairs = [(base_value(config.lam), base_value(config.mu))]
    covectors = list(config.xi)
    for sample in range(config.samples):
        lam, mu = random_coefficient_terms(rng, config.dim)
        pairs.append((lam[0][1], mu[0][1]))
        covectors.append(random_covector(rng, config.dim))
    try:
        worst, passed = halfspace_agreement(pairs, covectors, config.tolerances['halfspace'])
    except LameError as error:
        report.error('halfspace', error)
        return
    report.body['pairs'] = pairs
    report.body['covectors'] = covectors
    report.body['verdict'] = 'exact agreement' if passed else 'disagreement'
    report.check('halfspace', worst, config.tolerances['halfspace'])


def run_layered(config, report):
    profile = config.profile()
    layered = config.layered
    arguments = dict(rtol=layered['rtol'], atol=layered['atol'], method=layered['method'])
    try:
        if config.jobs > 1:
            with multiprocessing.Pool(config.jobs) as pool:
                rows, absolute, relative = remainder_table(profile, config.dim, layered['direction'],
                                                           layered['xi_norms'], mapper=pool.map, **arguments)
        else:
            rows, absolute, relative = remainder_table(profile, config.dim, layered['direction'],
                                                       layered['xi_norms'], **arguments)
        halving = halving_check(profile, layered['direction'], max(layered['xi_norms']), **arguments)
    except LameError as error:
        report.error('layered', error)
        return
    report.decay = rows
    report.body['profile'] = profile.as_dict()
    report.body['rows'] = [{'xi_norm': row.xi_norm, 'absolute': row.absolute, 'relative': row.relative,
                            'steps': row.steps}
                           for row in rows]
    report.body['absolute_fits'] = [fit.as_dict() for fit in absolute]
    report.body['relative_fits'] = [fit.as_dict() for fit in relative]
    margin = config.tolerances['slope_margin']
    for terms, fit in enumerate(relative):
        report.check(f'slope_{terms+1}_terms', fit.slope, -(terms+1)+margin)
    report.check('step_halving', halving, config.tolerances['halving'])


def _residuals_at(config, sample):
    rng = np.random.default_rng([config.seed, sample])
    collar = random_collar(rng, config.dim, config.order)
    _, _, diagnostics = symbol_diagnostics(collar, config.depth)
    return diagnostics


def run_residuals(config, report):
    try:
        samples = _parallel(functools.partial(_residuals_at, config), range(config.samples), config.jobs)
    except LameError as error:
        report.error('residuals', error)
        return
    worst = {}
    for diagnostics in samples:
        _collect(worst, diagnostics)
    report.body['samples'] = samples
    report.body['worst'] = worst
    _structure_checks(report, worst, config.tolerances)
    defect = 0.
    for mu in np.linspace(0.5, 2., 5):
        for lam in np.linspace(-mu, 3., 10):
            defect = max(defect, abs(normal_determinant(lam, mu)-mu*(lam+3*mu)**2)/max(mu*(lam+3*mu)**2, 1.))
    report.check('determinant', defect, config.tolerances['identity'])


RUNNERS = {'symbols': run_symbols,
           'recover': run_recover,
           'validate-halfspace': run_halfspace,
           'validate-layered': run_layered,
           'residuals': run_residuals}


def run(config):
    """
    Dispatch one experiment
    :type config: L{ExperimentConfig}
    :rtype: L{Report}
    """
    report = Report(config.mode, config.digest, config.data)
    start = time.perf_counter()
    RUNNERS[config.mode](config, report)
    report.timings['total'] = time.perf_counter()-start
    return report


def main(argv=None):
    parser = ArgumentParser(prog='lamedtn')
    parser.add_argument('mode', choices=MODES, help='Experiment to run')
    parser.add_argument('--config', required=True, help='JSON experiment configuration')
    parser.add_argument('--out', default=None, help='Directory for report.json (and the decay tables)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log every solve and integration')
    args = vars(parser.parse_args(argv))
    logging.basicConfig(level=logging.DEBUG if args['verbose'] else logging.INFO,
                        format='%(levelname)s %(message)s')
    try:
        config = ExperimentConfig.load(args['config'])
        if config.mode != args['mode']:
            raise ConfigError('mode', f'configuration is for {config.mode}, not {args["mode"]}')
    except ConfigError as error:
        logging.error(str(error))
        return 2
    try:
        report = run(config)
    except LameError as error:
        logging.error(f'{type(error).__name__}: {error}')
        return 3
    if args['out'] is not None:
        logging.info(f'Report written to {report.write(args["out"])}')
    print(report.summary())
    return report.status


if __name__ == '__main__':
    sys.exit(main())

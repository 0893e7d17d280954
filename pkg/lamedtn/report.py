"""
Machine-readable experiment reports
"""
import csv
import json
import logging
import math
import os

import numpy as np

from lamedtn.jet import Jet, SymbolMatrix

DECAY_FIELDS = ['xi_norm', 'err_p1', 'err_p1p0', 'err_p1p0pm1']


def encode(value):
    """
    JSON-compatible form: complex numbers as [re, im], arrays as nested row-major lists,
    non-finite floats as strings
    """
    if isinstance(value, SymbolMatrix):
        return {'degree': value.degree, 'order': value.order, 'value': encode(value.value())}
    if isinstance(value, Jet):
        return {'order': value.order, 'value': encode(value.value)}
    if isinstance(value, dict):
        return {str(key): encode(entry) for key, entry in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(entry) for entry in value]
    if isinstance(value, np.ndarray):
        return [encode(entry) for entry in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [encode(float(value.real)), encode(float(value.imag))]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return '-inf' if value < 0 else 'inf'
        return value
    return value


def expansion_record(expansion, base_point=None):
    """
    :type expansion: L{SymbolExpansion}
    :returns: one record per degree plus the solver diagnostics
    """
    record = {'kind': expansion.kind,
              'terms': {str(term.degree): encode(term) for term in expansion},
              'residuals': {str(degree): value for degree, value in expansion.residuals.items()},
              'cross_checks': {str(degree): value for degree, value in expansion.cross_checks.items()}}
    if base_point is not None:
        record['base_point'] = list(base_point)
    return record


def recovery_record(recovery, truth=None):
    """
    :type recovery: L{BoundaryRecovery}
    :param truth: optional C{(lambda values, mu values)} to compare against
    """
    lam, mu = recovery.values()
    record = {'xi': list(recovery.xi), 'lam': lam, 'mu': mu, 'residuals': recovery.residuals,
              'conditioning': recovery.conditioning, 'disagreements': recovery.disagreements,
              'warnings': recovery.warnings, 'failed_order': recovery.failed_order, 'error': recovery.error}
    if truth is not None:
        record['truth'] = {'lam': truth[0][:len(lam)], 'mu': truth[1][:len(mu)]}
    return record


class Report:
    """
    Single-writer accumulator of one run's results
    :ivar body: reproducible content (no timings)
    :ivar checks: verdict of each acceptance check by name
    :ivar errors: structured records of numerical failures
    """
    def __init__(self, mode, digest, inputs):
        self.mode = mode
        self.digest = digest
        self.body = {}
        self.checks = {}
        self.errors = []
        self.timings = {}
        self.inputs = inputs
        self.decay = None

    def check(self, name, value, tolerance, passed=None):
        """
        Record a check C{value <= tolerance} (or the given verdict)
        """
        if passed is None:
            passed = bool(value <= tolerance)
        self.checks[name] = {'value': value, 'tolerance': tolerance, 'passed': passed}
        logging.info(f'Check {name}: {"passed" if passed else "FAILED"} ({value} vs. {tolerance})')
        return passed

    def error(self, where, error):
        self.errors.append({'where': where, 'type': type(error).__name__, 'message': str(error)})
        logging.error(f'{where}: {error}')

    @property
    def passed(self):
        return all(check['passed'] for check in self.checks.values())

    @property
    def status(self):
        """
        Exit status: 0 success, 1 check failure, 3 numerical failure
        """
        if self.errors:
            return 3
        return 0 if self.passed else 1

    def document(self, timings=True):
        document = {'mode': self.mode, 'config_hash': self.digest, 'inputs': self.inputs, 'results': self.body,
                    'checks': self.checks, 'errors': self.errors, 'passed': self.passed and not self.errors}
        if timings:
            document['timings'] = self.timings
        return encode(document)

    def dumps(self, timings=True):
        return json.dumps(self.document(timings), sort_keys=True, indent=2)

    def write(self, directory):
        os.makedirs(directory, exist_ok=True)
        filename = os.path.join(directory, 'report.json')
        with open(filename, 'w') as handle:
            handle.write(self.dumps())
            handle.write('\n')
        if self.decay is not None:
            write_decay_csv(os.path.join(directory, 'decay.csv'), self.decay)
            write_decay_csv(os.path.join(directory, 'decay_relative.csv'), self.decay, relative=True)
        return filename

    def summary(self):
        lines = [f'{self.mode} [{self.digest[:12]}]']
        for name, check in sorted(self.checks.items()):
            lines.append(f'\t{"ok  " if check["passed"] else "FAIL"} {name}: {encode(check["value"])} '
                         f'(tolerance {check["tolerance"]})')
        for error in self.errors:
            lines.append(f'\tERROR {error["where"]}: {error["type"]}: {error["message"]}')
        return '\n'.join(lines)


def write_decay_csv(filename, rows, relative=False):
    """
    :param rows: list of L{RemainderRow}
    """
    with open(filename, 'w', newline='') as csvfile:
        writer = csv.DictWriter(csvfile, DECAY_FIELDS, extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            errors = row.relative if relative else row.absolute
            record = {'xi_norm': row.xi_norm}
            record.update({field: repr(float(error)) for field, error in zip(DECAY_FIELDS[1:], errors)})
            writer.writerow(record)

"""
Experiment configuration documents
"""
import hashlib
import json

import numpy as np

from lamedtn.errors import CollarError, ConfigError, StructureError
from lamedtn.geometry import CollarData, CollarMetric
from lamedtn.jet import JetSpace
from lamedtn.reference import LayerProfile

MODES = ('symbols', 'recover', 'validate-halfspace', 'validate-layered', 'residuals')

TOLERANCES = {'identity': 1e-12,
              'two_route': 1e-11,
              'residual': 1e-10,
              'homogeneity': 1e-10,
              'halfspace': 1e-10,
              'recovery': 1e-8,
              'independence': 1e-9,
              'slope_margin': 0.2,
              'halving': 1e-9}

# Graded layer whose coefficients meet their constant tails with three continuous derivatives
SAMPLE_LAYER = {'depth': 2.,
                'lam': [2.5, -1., 0.75, -0.25, 0.03125],
                'mu': [1.3, -0.6, 0.45, -0.15, 0.01875],
                'xi_norms': [8, 16, 32, 64, 128, 256],
                'rtol': 1e-11,
                'atol': 1e-13,
                'method': 'DOP853'}


def _integer(data, field, default=None, low=None, high=None):
    value = data.get(field, default)
    if value is None:
        raise ConfigError(field, 'missing required field')
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field, f'expected an integer, not {value!r}')
    if (low is not None and value < low) or (high is not None and value > high):
        raise ConfigError(field, f'{value} is outside [{low}, {high}]')
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(path, f'expected a finite number, not {value!r}')
    return float(value)


def _vector(value, length, path):
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(path, f'expected a list of {length} numbers')
    return [_number(entry, f'{path}[{index}]') for index, entry in enumerate(value)]


def polynomial_table(value, dim, path):
    """
    :returns: a validated list of C{(exponents, coefficient)} over the n coordinates
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [((0,)*dim, _number(value, path))]
    if not isinstance(value, list):
        raise ConfigError(path, 'expected a number or a list of [exponents, coefficient] pairs')
    table = []
    for index, term in enumerate(value):
        where = f'{path}[{index}]'
        if not isinstance(term, list) or len(term) != 2:
            raise ConfigError(where, 'expected [exponents, coefficient]')
        exponents, coefficient = term
        if not isinstance(exponents, list) or len(exponents) != dim or \
                any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in exponents):
            raise ConfigError(f'{where}[0]', f'expected {dim} non-negative integer exponents')
        table.append((tuple(exponents), _number(coefficient, f'{where}[1]')))
    return table


def base_value(table):
    return sum(coefficient for exponents, coefficient in table if not any(exponents))


def identity_metric(space):
    return [[space.constant(1. if alpha == beta else 0.) for beta in range(space.dim-1)]
            for alpha in range(space.dim-1)]


def _check_collar(space, metric, lam, mu, base_point, xi):
    """
    Admissibility of the collar, reported against the offending field
    """
    if metric is None:
        g_lower = identity_metric(space)
    else:
        g_lower = [[space.polynomial(entry) for entry in row] for row in metric]
    try:
        collar = CollarMetric(space, g_lower, base_point, xi)
    except CollarError as error:
        raise ConfigError('metric', str(error))
    for field, table in (('lam', lam), ('mu', mu)):
        try:
            collar.check_field(space.polynomial(table), field)
        except CollarError as error:
            raise ConfigError(field, str(error))


class ExperimentConfig:
    """
    Validated experiment description
    :ivar data: the raw document (used for hashing and echoing)
    :type data: dict
    """
    def __init__(self, data, mode, dim, order, depth, m_max, base_point, xi, metric, lam, mu, layered, seed,
                 samples, jobs, tolerances):
        self.data = data
        self.mode = mode
        self.dim = dim
        self.order = order
        self.depth = depth
        self.m_max = m_max
        self.base_point = base_point
        self.xi = xi
        self.metric = metric
        self.lam = lam
        self.mu = mu
        self.layered = layered
        self.seed = seed
        self.samples = samples
        self.jobs = jobs
        self.tolerances = tolerances

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError('', 'configuration must be a JSON object')
        mode = data.get('mode')
        if mode not in MODES:
            raise ConfigError('mode', f'expected one of {", ".join(MODES)}, not {mode!r}')
        dim = _integer(data, 'dim', 2, 2, 4)
        depth = _integer(data, 'depth', 3, 1)
        order = _integer(data, 'order', depth+2, 2)
        if order < depth+2:
            raise ConfigError('order', f'jet order {order} must be at least depth+2 = {depth+2}')
        m_max = _integer(data, 'm_max', min(2, depth-1), 0)
        if mode == 'recover' and m_max > depth-1:
            raise ConfigError('m_max', f'recovering order {m_max} needs depth >= {m_max+1}')
        base_point = _vector(data.get('base_point', [0.]*dim), dim, 'base_point')
        if base_point[-1] != 0:
            raise ConfigError('base_point', 'the base point must lie on the boundary x_n = 0')
        covectors = data.get('xi', [[1.]+[0.]*(dim-2)])
        if not isinstance(covectors, list) or not covectors:
            raise ConfigError('xi', 'expected a non-empty list of covectors')
        xi = []
        for index, entry in enumerate(covectors):
            vector = _vector(entry, dim-1, f'xi[{index}]')
            if not np.any(vector):
                raise ConfigError(f'xi[{index}]', 'covector must be nonzero')
            xi.append(vector)
        metric = data.get('metric')
        if metric is not None:
            if not isinstance(metric, list) or len(metric) != dim-1 or \
                    any(not isinstance(row, list) or len(row) != dim-1 for row in metric):
                raise ConfigError('metric', f'expected a {dim-1}x{dim-1} nested list of polynomial tables')
            metric = [[polynomial_table(entry, dim, f'metric[{alpha}][{beta}]') for beta, entry in enumerate(row)]
                      for alpha, row in enumerate(metric)]
        lam = polynomial_table(data.get('lam', 1.), dim, 'lam')
        mu = polynomial_table(data.get('mu', 1.), dim, 'mu')
        if base_value(mu) <= 0:
            raise ConfigError('mu', f'mu must be positive at the base point, not {base_value(mu)}')
        if base_value(lam)+base_value(mu) < 0:
            raise ConfigError('lam', 'lambda+mu must be non-negative at the base point')
        _check_collar(JetSpace(dim, order), metric, lam, mu, base_point, xi[0])
        layered = dict(SAMPLE_LAYER)
        if 'layered' in data:
            if not isinstance(data['layered'], dict):
                raise ConfigError('layered', 'expected an object')
            unknown = set(data['layered'])-set(SAMPLE_LAYER)-{'direction'}
            if unknown:
                raise ConfigError(f'layered.{sorted(unknown)[0]}', 'unknown field')
            layered.update(data['layered'])
        layered['direction'] = _vector(layered.get('direction', [1.]+[0.]*(dim-2)), dim-1, 'layered.direction')
        try:
            LayerProfile(_number(layered['depth'], 'layered.depth'),
                         [_number(c, 'layered.lam') for c in layered['lam']],
                         [_number(c, 'layered.mu') for c in layered['mu']])
        except (TypeError, StructureError) as error:
            raise ConfigError('layered', str(error))
        if len(layered['xi_norms']) < 5 or any(_number(value, 'layered.xi_norms') <= 0 for value in layered['xi_norms']):
            raise ConfigError('layered.xi_norms', 'expected at least 5 positive frequencies')
        seed = _integer(data, 'seed', 0, 0)
        samples = _integer(data, 'samples', 10, 1)
        jobs = _integer(data, 'jobs', 1, 1)
        tolerances = dict(TOLERANCES)
        extra = data.get('tolerances', {})
        if not isinstance(extra, dict):
            raise ConfigError('tolerances', 'expected an object')
        for key, value in extra.items():
            if key not in TOLERANCES:
                raise ConfigError(f'tolerances.{key}', 'unknown tolerance')
            tolerances[key] = _number(value, f'tolerances.{key}')
        return cls(data, mode, dim, order, depth, m_max, base_point, xi, metric, lam, mu, layered, seed, samples,
                   jobs, tolerances)

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'r') as handle:
                data = json.load(handle)
        except FileNotFoundError:
            raise ConfigError('', f'no configuration file {path}')
        except json.JSONDecodeError as error:
            raise ConfigError('', f'{path} is not valid JSON: {error}')
        return cls.from_dict(data)

    @property
    def digest(self):
        """
        SHA-256 of the canonical JSON form of the document
        """
        canonical = json.dumps(self.data, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def space(self):
        return JetSpace(self.dim, self.order)

    def collar(self, xi=None):
        """
        :returns: the configured collar data expanded at the covector C{xi} (default: the first one)
        :rtype: L{CollarData}
        """
        space = self.space()
        if self.metric is None:
            metric = identity_metric(space)
        else:
            metric = [[space.polynomial(entry) for entry in row] for row in self.metric]
        return CollarData(space, metric, space.polynomial(self.lam), space.polynomial(self.mu), self.base_point,
                          self.xi[0] if xi is None else xi)

    def profile(self):
        return LayerProfile(self.layered['depth'], self.layered['lam'], self.layered['mu'])

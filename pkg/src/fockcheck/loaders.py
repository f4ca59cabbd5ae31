"""The loaders module.

JSON schemas of the input files and loaders that turn validated data into
domain objects. Loaders validate in strict mode, so bad input raises
:class:`.InputError` carrying the JSON path of every offending field.
"""

import json
import math
from pathlib import Path

from .base import InputError
from . import entire
from .conditions import ConstantsConfig, ProbeGrid
from .ode import LDEProblem
from .quadrature import (
    AUTO,
    RADIAL_RULES,
    QuadratureConfig,
    SpaceSpec,
)
from .schema import Schema, SchemaABC
from .validators import (
    All,
    Any,
    As,
    Complex,
    Count,
    Number,
    Optional,
    Positive,
    Tagged,
    Validate,
    Value,
)
from .weights import KINDS, WeightProfile


def _non_empty(items):
    return len(items) > 0


class _FunctionRef(SchemaABC):
    """Reference to :data:`FUNCTION` from inside its own definition."""
    def __call__(self, obj):
        return FUNCTION(obj, strict=False)


_function = _FunctionRef('function')

_coefficients = All([Complex], Validate(_non_empty))


def _weight_choice(kind):
    spec = {'kind': kind, Optional('label'): str}
    if KINDS[kind] is not None:
        spec[KINDS[kind]] = Positive
    return spec


#: Weight profile: ``{"kind": "power", "alpha": 4}``.
WEIGHT = Schema(Tagged('kind', {kind: _weight_choice(kind) for kind in KINDS}))

_named = Tagged('name', {
    'exp_scaled': {'type': 'named', 'name': 'exp_scaled',
                   Optional('c', default=1): Complex},
    'constant': {'type': 'named', 'name': 'constant', 'c': Complex},
    'monomial': {'type': 'named', 'name': 'monomial', 'm': Count},
    'cos': {'type': 'named', 'name': 'cos'},
    'sin': {'type': 'named', 'name': 'sin'},
    'exp_exp': {'type': 'named', 'name': 'exp_exp'},
})

#: Entire function representation, tagged on ``"type"``.
FUNCTION = Schema(Tagged('type', {
    'poly': {'type': 'poly', 'coeffs': _coefficients},
    'series': {'type': 'series', 'coeffs': _coefficients,
               Optional('tail_tol'): Positive},
    'named': _named,
    'sum': {'type': 'sum', 'terms': All([_function], Validate(_non_empty))},
    'product': {'type': 'product',
                'factors': All([_function],
                               Validate(lambda items: len(items) == 2))},
    'scaled': {'type': 'scaled', 'factor': Complex, 'inner': _function},
}))


def _orders_agree(data):
    k = data['order']
    if len(data['coefficients']) != k:
        raise ValueError('coefficients must have {} entries'.format(k))
    if 'initial' in data and len(data['initial']) != k:
        raise ValueError('initial must have {} entries'.format(k))
    return True


#: Linear differential equation with its initial data.
PROBLEM = Schema(All({
    'order': All(int, Validate(lambda k: k >= 1)),
    'coefficients': [_function],
    Optional('forcing'): _function,
    Optional('initial'): [Complex],
}, Validate(_orders_agree)))

#: Quadrature configuration; every key is optional.
QUADRATURE = Schema({
    Optional('n_radial'): Count,
    Optional('n_angular'): Count,
    Optional('r_max'): Any(Value(AUTO), Positive),
    Optional('radial_rule'): Any(*(Value(rule) for rule in RADIAL_RULES)),
    Optional('tail_tol'): Positive,
    Optional('segment_nodes'): Count,
    Optional('panel_width'): Positive,
    Optional('r_cap'): Positive,
    Optional('max_panels'): Count,
})

#: Unspecified hypothesis constants; every key is optional.
CONSTANTS = Schema({
    Optional('C'): Positive,
    Optional('D'): [Positive],
    Optional('Ci'): [Positive],
    Optional('E'): [Positive],
    Optional('F'): [Positive],
    Optional('G'): Positive,
})

_exponent = Any(Positive, All(Value('inf'), As(lambda _: math.inf)))

#: Function space ``F^{p,q}_φ`` with ``m`` derivatives.
SPACE = Schema({
    'weight': WEIGHT,
    Optional('p', default=2): _exponent,
    Optional('q', default=0): Number,
    Optional('m', default=0): Count,
})

#: Outer probe grid of the kernel functionals.
PROBE_GRID = Schema({
    Optional('radii'): All([Positive], Validate(_non_empty)),
    Optional('n_angles'): All(Count, Validate(lambda n: n >= 1)),
    Optional('extension'): [Positive],
})


def read_json(path):
    """Read a JSON file, reporting malformed text as :class:`.InputError`."""
    text = Path(path).read_text(encoding='utf-8')
    try:
        return json.loads(text)
    except ValueError as exc:
        raise InputError('Input validation failed',
                         errors='invalid JSON in {}: {}'.format(path, exc),
                         data=None, original_data=text)


def load_weight(data):
    return WeightProfile.from_dict(WEIGHT(data, strict=True).data)


def load_function(data):
    return entire.from_dict(FUNCTION(data, strict=True).data)


def load_problem(data):
    return LDEProblem.from_dict(PROBLEM(data, strict=True).data)


def load_quadrature(data):
    return QuadratureConfig.from_dict(QUADRATURE(data, strict=True).data)


def load_constants(data):
    return ConstantsConfig.from_dict(CONSTANTS(data, strict=True).data)


def load_space(data):
    parsed = SPACE(data, strict=True).data
    return SpaceSpec(WeightProfile.from_dict(parsed['weight']),
                     parsed['p'], parsed['q'], parsed['m'])


def load_probe_grid(data):
    return ProbeGrid(**PROBE_GRID(data, strict=True).data)

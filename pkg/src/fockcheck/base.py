"""The base module.

Shared exceptions, sentinels and small result records used across the
package.
"""

from abc import ABC, abstractmethod
from collections import namedtuple
import hashlib

import numpy as np


class _NotSet(object):  # pragma: no cover
    def __bool__(self):
        return False

    def __repr__(self):
        return '<NotSet>'


NotSet = _NotSet()


class FockError(Exception):
    """Base exception for every error raised by this package."""
    pass


class ConfigError(FockError, ValueError):
    """Exception raised when a configuration record holds an invalid value.

    Attributes:
        field (str): Name of the offending field.
    """
    def __init__(self, message, field=None):
        super().__init__(message)
        self.message = message
        self.field = field

    def __str__(self):  # pragma: no cover
        if self.field is None:
            return self.message
        return '{}: {}'.format(self.field, self.message)


class InputError(FockError, AssertionError):
    """Exception raised when input data fails schema validation in strict
    mode.

    Attributes:
        message (str): Generic error message.
        errors (str|dict): Schema validation error string or dictionary.
        paths (list): Flattened ``(json_path, message)`` pairs, sorted.
        data (object): Partially parsed data or ``None``.
        original_data (object): Original data being validated.
    """
    def __init__(self, message, errors, data, original_data):
        super().__init__(message)
        self.message = message
        self.errors = errors
        self.paths = flatten_errors(errors)
        self.data = data
        self.original_data = original_data

    def __str__(self):  # pragma: no cover
        return '{}: {}'.format(
            self.message,
            '; '.join('{} {}'.format(path, msg) for path, msg in self.paths))


class WeightError(FockError, ArithmeticError):
    """Exception raised when a weight profile cannot be evaluated."""
    pass


class SeriesTruncationError(FockError, ArithmeticError):
    """Exception raised when a truncated series cannot certify its value."""
    pass


class MomentError(FockError, ArithmeticError):
    """Exception raised when a kernel moment integral does not converge."""
    pass


class SolverError(FockError, ArithmeticError):
    """Exception raised by the differential equation solvers."""
    pass


class ConditionError(FockError):
    """Exception raised when a theorem checker cannot run on its inputs."""
    pass


class EvaluatorABC(ABC):
    """Abstract base class for anything that can be evaluated pointwise on
    complex arrays and whose modulus can be taken in the log domain.
    """
    @abstractmethod
    def __call__(self, z):  # pragma: no cover
        pass

    def log_abs(self, z):
        """Return ``log|f(z)|`` (``-inf`` at zeros)."""
        with np.errstate(divide='ignore'):
            return np.log(np.abs(self(z)))

    __hash__ = None


class Verdict(namedtuple('Verdict', ['status', 'norm', 'diagnostics'])):
    """Numerical verdict on whether a function lies in a space.

    Attributes:
        status (str): ``'in_space'``, ``'diverging'`` or ``'unresolved'``.
        norm (NormResult): The underlying norm computation.
        diagnostics (dict): Tail-dominance and divergence details.
    """
    @property
    def in_space(self):
        return self.status == IN_SPACE

    def to_dict(self):
        return {'status': self.status,
                'norm': None if self.norm is None else self.norm.to_dict(),
                'diagnostics': dict(self.diagnostics)}


#: Verdict status for a norm quadrature that converged.
IN_SPACE = 'in_space'

#: Verdict status for a norm quadrature whose integrand stopped decaying.
DIVERGING = 'diverging'

#: Verdict status for a probe that could not be evaluated on its grid.
UNRESOLVED = 'unresolved'


def flatten_errors(errors, path='$'):
    """Flatten nested schema errors into sorted ``(json_path, message)``
    pairs.

    Integer keys become list indices and other keys become object members.

    Args:
        errors (str|dict|None): Errors as produced by schema validation.
        path (str, optional): Path prefix. Defaults to ``'$'``.

    Returns:
        list: ``(path, message)`` tuples.

    Example:

        >>> flatten_errors({'coeffs': {2: 'bad value: type error'}})
        [('$.coeffs[2]', 'bad value: type error')]
    """
    if not errors:
        return []

    if not isinstance(errors, dict):
        return [(path, str(errors))]

    flat = []
    for key in sorted(errors, key=str):
        if isinstance(key, int):
            subpath = '{}[{}]'.format(path, key)
        else:
            subpath = '{}.{}'.format(path, key)
        flat.extend(flatten_errors(errors[key], subpath))

    return flat


def grid_hash(*arrays):
    """Return a short SHA-256 digest identifying a set of grid arrays."""
    digest = hashlib.sha256()
    for array in arrays:
        array = np.ascontiguousarray(np.asarray(array, dtype=complex))
        digest.update(str(array.shape).encode())
        digest.update(array.tobytes())
    return digest.hexdigest()[:16]

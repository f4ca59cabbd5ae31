"""The entire module.

Representations of entire functions with exact derivative and primitive
algebra. Coefficients of equations, forcing terms and solutions all share
this representation.

Evaluation is vectorized: every representation accepts a scalar or a
``numpy`` array of complex points and returns values of the same shape.
"""

from abc import abstractmethod
import logging
import math

import numpy as np
from numpy.polynomial.polynomial import polyval
from scipy.optimize import minimize_scalar

from .base import EvaluatorABC, SeriesTruncationError


logger = logging.getLogger(__name__)

#: Default truncation tolerance of :class:`PowerSeries` evaluation.
DEFAULT_TAIL_TOL = 1e-12

#: Degree used when a representation without a closed-form primitive is
#: converted to a power series.
DEFAULT_SERIES_ORDER = 80

#: Number of trailing terms checked by the truncation certificate. Three
#: covers series whose nonzero coefficients repeat with period up to three.
CERTIFICATE_TERMS = 3

NAMED_FORMS = ('exp_scaled', 'cos', 'sin', 'monomial', 'constant', 'exp_exp')


class EntireFunction(EvaluatorABC):
    """Abstract base class of every entire function representation."""

    #: Tag used in the JSON encoding.
    type_name = None

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        """Return the value of the function at `z` (scalar or array)."""
        points = np.asarray(z, dtype=complex)
        values = self._evaluate(points)
        if points.ndim == 0:
            return complex(values)
        return values

    @abstractmethod
    def _evaluate(self, z):  # pragma: no cover
        pass

    def derivative(self, order=1):
        """Return the `order`-th derivative as a new representation."""
        if order < 0:
            raise ValueError('derivative order must be non-negative but '
                             'found {!r}'.format(order))
        result = self
        for _ in range(order):
            result = result._derivative()
        return result

    @abstractmethod
    def _derivative(self):  # pragma: no cover
        pass

    def antiderivative(self, order=1):
        """Return the `order`-fold primitive whose derivatives of orders
        ``0..order-1`` vanish at the origin.
        """
        if order < 1:
            raise ValueError('antiderivative order must be at least 1 but '
                             'found {!r}'.format(order))
        result = self
        for _ in range(order):
            result = result._antiderivative()
        return result

    def _antiderivative(self):
        return as_series(self)._antiderivative()

    @abstractmethod
    def taylor(self, N):  # pragma: no cover
        """Return the Taylor coefficients ``a_0..a_N`` at the origin."""
        pass

    def degree(self):
        """Return the polynomial degree, ``-1`` for the zero function and
        ``None`` for a transcendental or truncated-series representation.
        """
        return None

    def is_zero(self):
        return self.degree() == -1

    def is_constant(self):
        degree = self.degree()
        return degree is not None and degree <= 0

    @abstractmethod
    def to_dict(self):  # pragma: no cover
        pass

    def __repr__(self):  # pragma: no cover
        return '<{} {!r}>'.format(self.__class__.__name__, self.to_dict())

    def __add__(self, other):
        return Sum([self, _coerce(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return Sum([self, Scaled(-1, _coerce(other))])

    def __neg__(self):
        return Scaled(-1, self)

    def __mul__(self, other):
        if isinstance(other, EntireFunction):
            return Product(self, other)
        return Scaled(other, self)

    __rmul__ = __mul__


class Polynomial(EntireFunction):
    """A polynomial given by its ascending coefficients.

    Args:
        coeffs (list): Complex coefficients ``c_0, c_1, ...``.
    """
    type_name = 'poly'

    def __init__(self, coeffs):
        coeffs = np.array(coeffs if len(coeffs) else [0], dtype=complex)
        self.coeffs = coeffs

    def _evaluate(self, z):
        return polyval(z, self.coeffs)

    def _derivative(self):
        n = np.arange(1, len(self.coeffs))
        return Polynomial(self.coeffs[1:] * n)

    def _antiderivative(self):
        n = np.arange(1, len(self.coeffs) + 1)
        return Polynomial(np.concatenate(([0], self.coeffs / n)))

    def taylor(self, N):
        out = np.zeros(N + 1, dtype=complex)
        size = min(N + 1, len(self.coeffs))
        out[:size] = self.coeffs[:size]
        return out

    def degree(self):
        nonzero = np.flatnonzero(self.coeffs)
        return int(nonzero[-1]) if len(nonzero) else -1

    @property
    def leading(self):
        degree = self.degree()
        return complex(self.coeffs[degree]) if degree >= 0 else 0j

    def to_dict(self):
        return {'type': self.type_name,
                'coeffs': [_encode_complex(c) for c in self.coeffs]}


class PowerSeries(EntireFunction):
    """A truncated Taylor series with a certified evaluation radius.

    Evaluation uses Horner's scheme over the fixed coefficient array and
    refuses points where the final terms are not negligible against the
    largest term. Term magnitudes are compared in the log domain.

    Args:
        coeffs (list): Complex coefficients ``a_0..a_N``.
        tail_tol (float, optional): Truncation tolerance. Defaults to
            :const:`DEFAULT_TAIL_TOL`.
    """
    type_name = 'series'

    def __init__(self, coeffs, tail_tol=DEFAULT_TAIL_TOL):
        self.coeffs = np.array(coeffs if len(coeffs) else [0], dtype=complex)
        self.tail_tol = tail_tol

    @property
    def order(self):
        return len(self.coeffs) - 1

    def _evaluate(self, z):
        flat = np.abs(z).ravel()
        n = np.arange(len(self.coeffs))[:, None]
        with np.errstate(divide='ignore', invalid='ignore'):
            log_terms = (np.log(np.abs(self.coeffs))[:, None] +
                         np.where(n > 0, n * np.log(flat), 0.0))
        peak = np.max(log_terms, axis=0)
        last = np.max(log_terms[-CERTIFICATE_TERMS:], axis=0)

        bad = ~(last <= math.log(self.tail_tol) + np.logaddexp(0, peak))
        if np.any(bad):
            radius = float(np.max(flat[bad]))
            raise SeriesTruncationError(
                'series truncation insufficient at |z|={:.6g} (order {})'
                .format(radius, self.order))

        return polyval(z, self.coeffs)

    def _derivative(self):
        n = np.arange(1, len(self.coeffs))
        return PowerSeries(self.coeffs[1:] * n, self.tail_tol)

    def _antiderivative(self):
        n = np.arange(1, len(self.coeffs) + 1)
        return PowerSeries(np.concatenate(([0], self.coeffs / n)),
                           self.tail_tol)

    def taylor(self, N):
        out = np.zeros(N + 1, dtype=complex)
        size = min(N + 1, len(self.coeffs))
        out[:size] = self.coeffs[:size]
        return out

    def degree(self):
        if not np.any(self.coeffs):
            return -1
        return None

    def to_dict(self):
        return {'type': self.type_name,
                'coeffs': [_encode_complex(c) for c in self.coeffs],
                'tail_tol': self.tail_tol}


class NamedForm(EntireFunction):
    """A closed-form entire function.

    Args:
        name (str): One of ``exp_scaled`` (e^(cz)), ``cos``, ``sin``,
            ``monomial`` (z^m), ``constant`` (c) or ``exp_exp`` (e^(e^z)).
        param (complex|int, optional): ``c`` for ``exp_scaled`` and
            ``constant``, ``m`` for ``monomial``.
    """
    type_name = 'named'

    def __init__(self, name, param=None):
        if name not in NAMED_FORMS:
            raise ValueError('unknown named form {!r}'.format(name))

        if name in ('exp_scaled', 'constant'):
            param = complex(1 if param is None else param)
        elif name == 'monomial':
            if param is None or int(param) != param or param < 0:
                raise ValueError('monomial needs an integer m >= 0 but found '
                                 '{!r}'.format(param))
            param = int(param)
        else:
            param = None

        self.name = name
        self.param = param

    def _evaluate(self, z):
        name = self.name
        if name == 'exp_scaled':
            return np.exp(self.param * z)
        if name == 'cos':
            return np.cos(z)
        if name == 'sin':
            return np.sin(z)
        if name == 'monomial':
            return z ** self.param
        if name == 'constant':
            return np.full_like(z, self.param)
        with np.errstate(over='ignore', invalid='ignore'):
            return np.exp(np.exp(z))

    def log_abs(self, z):
        z = np.asarray(z, dtype=complex)
        if self.name == 'exp_scaled':
            return (self.param * z).real
        if self.name == 'exp_exp':
            return np.exp(z).real
        return super().log_abs(z)

    def _derivative(self):
        name, c = self.name, self.param
        if name == 'exp_scaled':
            return Scaled(c, self) if c != 1 else self
        if name == 'cos':
            return Scaled(-1, NamedForm('sin'))
        if name == 'sin':
            return NamedForm('cos')
        if name == 'monomial':
            if c == 0:
                return constant(0)
            return Scaled(c, NamedForm('monomial', c - 1))
        if name == 'constant':
            return constant(0)
        return Product(exp_scaled(1), self)

    def _antiderivative(self):
        name, c = self.name, self.param
        if name == 'exp_scaled':
            if c == 0:
                return Polynomial([0, 1])
            return Sum([Scaled(1 / c, self), constant(-1 / c)])
        if name == 'cos':
            return NamedForm('sin')
        if name == 'sin':
            return Sum([constant(1), Scaled(-1, NamedForm('cos'))])
        if name in ('monomial', 'constant'):
            return Polynomial(self.taylor(self.degree() + 1))._antiderivative()
        return super()._antiderivative()

    def taylor(self, N):
        n = np.arange(N + 1)
        name, c = self.name, self.param
        inv_factorial = np.exp(-_log_factorials(N))

        if name == 'exp_scaled':
            out = np.zeros(N + 1, dtype=complex)
            term = 1 + 0j
            for index in range(N + 1):
                out[index] = term
                term = term * c / (index + 1)
            return out
        if name == 'cos':
            signs = np.where(n % 2 == 0, (-1.0) ** (n // 2), 0.0)
            return (signs * inv_factorial).astype(complex)
        if name == 'sin':
            signs = np.where(n % 2 == 1, (-1.0) ** (n // 2), 0.0)
            return (signs * inv_factorial).astype(complex)
        if name in ('monomial', 'constant'):
            out = np.zeros(N + 1, dtype=complex)
            if name == 'constant':
                out[0] = c
            elif c <= N:
                out[c] = 1
            return out
        return series_exp(NamedForm('exp_scaled', 1).taylor(N))

    def degree(self):
        if self.name == 'monomial':
            return self.param
        if self.name == 'constant':
            return 0 if self.param != 0 else -1
        return None

    def to_dict(self):
        data = {'type': self.type_name, 'name': self.name}
        if self.name == 'monomial':
            data['m'] = self.param
        elif self.param is not None:
            data['c'] = _encode_complex(self.param)
        return data


class Sum(EntireFunction):
    """The sum of a list of entire functions, evaluated in list order.

    Args:
        terms (list): :class:`EntireFunction` terms.
    """
    type_name = 'sum'

    def __init__(self, terms):
        self.terms = tuple(_coerce(t) for t in terms)

    def _evaluate(self, z):
        total = np.zeros_like(z)
        for term in self.terms:
            total = total + term._evaluate(z)
        return total

    def _derivative(self):
        return Sum([t._derivative() for t in self.terms])

    def _antiderivative(self):
        return Sum([t._antiderivative() for t in self.terms])

    def taylor(self, N):
        total = np.zeros(N + 1, dtype=complex)
        for term in self.terms:
            total = total + term.taylor(N)
        return total

    def degree(self):
        degrees = [t.degree() for t in self.terms]
        if any(d is None for d in degrees):
            return None
        if not degrees:
            return -1
        top = max(degrees)
        if top < 0:
            return -1
        # Cancellation is decided on the coefficients.
        return Polynomial(self.taylor(top)).degree()

    def to_dict(self):
        return {'type': self.type_name,
                'terms': [t.to_dict() for t in self.terms]}


class Product(EntireFunction):
    """The product of two entire functions.

    Args:
        left (EntireFunction): First factor.
        right (EntireFunction): Second factor.
    """
    type_name = 'product'

    def __init__(self, left, right):
        self.left = _coerce(left)
        self.right = _coerce(right)

    def _evaluate(self, z):
        return self.left._evaluate(z) * self.right._evaluate(z)

    def log_abs(self, z):
        return self.left.log_abs(z) + self.right.log_abs(z)

    def _derivative(self):
        return Sum([Product(self.left._derivative(), self.right),
                    Product(self.left, self.right._derivative())])

    def _antiderivative(self):
        degree = self.degree()
        if degree is not None:
            return Polynomial(self.taylor(max(degree, 0)))._antiderivative()
        return super()._antiderivative()

    def taylor(self, N):
        return _cauchy(self.left.taylor(N), self.right.taylor(N), N)

    def degree(self):
        left, right = self.left.degree(), self.right.degree()
        if left == -1 or right == -1:
            return -1
        if left is None or right is None:
            return None
        return left + right

    def to_dict(self):
        return {'type': self.type_name,
                'factors': [self.left.to_dict(), self.right.to_dict()]}


class Scaled(EntireFunction):
    """A complex multiple of an entire function.

    Args:
        factor (complex): Scale factor.
        inner (EntireFunction): The scaled function.
    """
    type_name = 'scaled'

    def __init__(self, factor, inner):
        self.factor = complex(factor)
        self.inner = _coerce(inner)

    def _evaluate(self, z):
        return self.factor * self.inner._evaluate(z)

    def log_abs(self, z):
        with np.errstate(divide='ignore'):
            return np.log(abs(self.factor)) + self.inner.log_abs(z)

    def _derivative(self):
        return Scaled(self.factor, self.inner._derivative())

    def _antiderivative(self):
        return Scaled(self.factor, self.inner._antiderivative())

    def taylor(self, N):
        return self.factor * self.inner.taylor(N)

    def degree(self):
        if self.factor == 0:
            return -1
        return self.inner.degree()

    def to_dict(self):
        return {'type': self.type_name,
                'factor': _encode_complex(self.factor),
                'inner': self.inner.to_dict()}


def constant(c):
    """Return the constant function `c`."""
    return NamedForm('constant', c)


def zero():
    """Return the zero function."""
    return constant(0)


def monomial(m):
    """Return z^m."""
    return NamedForm('monomial', m)


def exp_scaled(c=1):
    """Return e^(cz)."""
    return NamedForm('exp_scaled', c)


def exp_exp():
    """Return e^(e^z)."""
    return NamedForm('exp_exp')


def cos():
    """Return cos z."""
    return NamedForm('cos')


def sin():
    """Return sin z."""
    return NamedForm('sin')


def as_series(f, N=DEFAULT_SERIES_ORDER, tail_tol=DEFAULT_TAIL_TOL):
    """Return the degree-`N` :class:`PowerSeries` of `f`."""
    if isinstance(f, PowerSeries):
        return f
    return PowerSeries(f.taylor(N), tail_tol)


def evaluate(f, z):
    """Return ``f(z)``.

    Raises:
        SeriesTruncationError: If a series cannot certify its value at `z`.
    """
    return f.evaluate(z)


def differentiate(f, order=1):
    """Return the exact `order`-th derivative of `f`."""
    return f.derivative(order)


def antiderivative(f, order=1):
    """Return the `order`-fold primitive of `f` with zero integration
    constants.
    """
    return f.antiderivative(order)


def series_multiply(f, g, N):
    """Return the Cauchy product of `f` and `g` truncated at degree `N`.

    Each coefficient ``c_n = Σ a_i b_(n-i)`` is accumulated in ascending
    ``i``.

    Args:
        f (EntireFunction): First factor (series or polynomial).
        g (EntireFunction): Second factor (series or polynomial).
        N (int): Truncation degree.

    Returns:
        PowerSeries
    """
    tail_tol = min(getattr(f, 'tail_tol', DEFAULT_TAIL_TOL),
                   getattr(g, 'tail_tol', DEFAULT_TAIL_TOL))
    return PowerSeries(_cauchy(f.taylor(N), g.taylor(N), N), tail_tol)


def series_exp(h, N=None):
    """Return the Taylor coefficients of ``exp(h)`` from those of `h`, using
    ``n g_n = Σ_(k=1..n) k h_k g_(n-k)``.
    """
    h = np.asarray(h, dtype=complex)
    N = len(h) - 1 if N is None else N
    g = np.zeros(N + 1, dtype=complex)
    g[0] = np.exp(h[0])
    for n in range(1, N + 1):
        k = np.arange(1, min(n, len(h) - 1) + 1)
        g[n] = np.sum(k * h[k] * g[n - k]) / n
    return g


def max_modulus(f, r, n_theta=256):
    """Return ``M(r, f)``: the maximum of ``|f|`` on the circle of radius `r`.

    The maximum over `n_theta` equispaced angles is refined by a bounded
    scalar search around the three best grid angles.
    Values beyond the float range saturate to ``inf``; use
    :func:`log_max_modulus` for fast-growing functions.

    Args:
        f (EntireFunction): The function.
        r (float): Radius, non-negative.
        n_theta (int, optional): Number of angles, at least 64.
    """
    log_value = log_max_modulus(f, r, n_theta)
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def log_max_modulus(f, r, n_theta=256):
    """Return ``log M(r, f)`` computed without overflow."""
    if r < 0:
        raise ValueError('radius must be non-negative but found {!r}'
                         .format(r))
    if n_theta < 64:
        raise ValueError('n_theta must be at least 64 but found {!r}'
                         .format(n_theta))

    if r == 0:
        return float(f.log_abs(np.array([0j]))[0])

    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    values = f.log_abs(r * np.exp(1j * theta))
    best = float(np.max(values))

    if not np.isfinite(best):
        return best

    step = 2 * np.pi / n_theta
    for index in np.argsort(-values, kind='stable')[:3]:
        center = theta[index]
        found = minimize_scalar(
            lambda t: -float(f.log_abs(np.array([r * np.exp(1j * t)]))[0]),
            bounds=(center - step, center + step), method='bounded',
            options={'xatol': 1e-12})
        if np.isfinite(found.fun):
            best = max(best, -float(found.fun))

    return best


def nevanlinna_proxy(f, r, n_theta=256):
    """Return ``T(r, f) ≈ log⁺ M(r, f)``."""
    return max(0.0, log_max_modulus(f, r, n_theta))


def growth_order_estimate(f, radii, n_theta=256):
    """Estimate the order of growth as the slope of ``log log M(r)`` against
    ``log r`` between the last two radii.

    Returns ``0.0`` when ``M(r) <= e`` at those radii (polynomial growth is
    order zero).
    """
    radii = sorted(radii)
    if len(radii) < 2:
        raise ValueError('need at least two radii')

    r1, r2 = radii[-2], radii[-1]
    t1 = log_max_modulus(f, r1, n_theta)
    t2 = log_max_modulus(f, r2, n_theta)

    if t1 <= 1 or t2 <= 1:
        return 0.0

    return (math.log(t2) - math.log(t1)) / (math.log(r2) - math.log(r1))


def from_dict(data):
    """Build a representation from its JSON encoding (already validated)."""
    kind = data['type']

    if kind == 'poly':
        return Polynomial(data['coeffs'])
    if kind == 'series':
        return PowerSeries(data['coeffs'],
                           data.get('tail_tol', DEFAULT_TAIL_TOL))
    if kind == 'named':
        name = data['name']
        param = data.get('m') if name == 'monomial' else data.get('c')
        return NamedForm(name, param)
    if kind == 'sum':
        return Sum([from_dict(t) for t in data['terms']])
    if kind == 'product':
        left, right = data['factors']
        return Product(from_dict(left), from_dict(right))
    if kind == 'scaled':
        return Scaled(data['factor'], from_dict(data['inner']))

    raise ValueError('unknown function type {!r}'.format(kind))


def _cauchy(a, b, N):
    out = np.zeros(N + 1, dtype=complex)
    for i in range(N + 1):
        if a[i] != 0:
            out[i:] = out[i:] + a[i] * b[:N + 1 - i]
    return out


def _log_factorials(N):
    return np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, N + 1)))))


def _coerce(value):
    if isinstance(value, EntireFunction):
        return value
    return constant(value)


def _encode_complex(value):
    value = complex(value)
    return [value.real, value.imag]

"""The weights module.

Radial weight profiles φ and numerical diagnostics for the class of rapidly
increasing weights.

Every profile evaluates φ and its first two radial derivatives in closed
form. The exponential kinds overflow double precision at moderate radii, so
each profile also exposes log forms (``log_phi``, ``log_phi_prime``,
``log_laplacian``) that the quadratures use instead.
"""

from collections import namedtuple
import logging
import math

import numpy as np

from .base import WeightError


logger = logging.getLogger(__name__)

#: Built-in profile kinds and the parameter each one takes.
KINDS = {
    'power': 'alpha',
    'exponential': 'beta',
    'double_exponential': None,
    'classical_gaussian': None,
    'scaled_exponential': 'c',
    'fock_sobolev': 'm',
}

#: Exponents scanned by the ``τ(r)r^C increasing`` regularity route.
REGULARITY_EXPONENTS = (0.5, 1.0, 2.0, 4.0)

#: Route names reported by :func:`classify_weight`.
ROUTE_TAU_POWER = 'tau_rC_increasing'
ROUTE_TAU_LOG = 'tau_prime_log_vanishes'
ROUTE_NEITHER = 'neither'


class WeightProfile(object):
    """A radial weight φ with exact first and second derivatives.

    Args:
        kind (str): One of :data:`KINDS`.
        param (float, optional): The kind parameter (α, β, c or m).
        label (str, optional): Display label. Defaults to a generated one.
    """
    def __init__(self, kind, param=None, label=None):
        if kind not in KINDS:
            raise WeightError('unknown weight kind {!r}'.format(kind))

        if KINDS[kind] is None:
            param = None
        elif param is None or not param > 0:
            raise WeightError('{} weight needs {} > 0 but found {!r}'
                              .format(kind, KINDS[kind], param))
        else:
            param = float(param)

        self.kind = kind
        self.param = param
        self.label = label or self._default_label()

    def _default_label(self):
        if self.param is None:
            return self.kind
        return '{}({}={})'.format(self.kind, KINDS[self.kind], self.param)

    @property
    def is_classical(self):
        return self.kind == 'classical_gaussian'

    def __repr__(self):  # pragma: no cover
        return '<{} {}>'.format(self.__class__.__name__, self.label)

    def __eq__(self, other):
        return (isinstance(other, WeightProfile) and
                (self.kind, self.param) == (other.kind, other.param))

    def __hash__(self):
        return hash((self.kind, self.param))

    def to_dict(self):
        data = {'kind': self.kind}
        if self.param is not None:
            data[KINDS[self.kind]] = self.param
        return data

    @classmethod
    def from_dict(cls, data):
        kind = data['kind']
        name = KINDS.get(kind)
        return cls(kind, data.get(name) if name else None,
                   label=data.get('label'))

    def log_phi(self, r):
        """Return ``log φ(r)``."""
        r = np.asarray(r, dtype=float)
        a = self.param

        with np.errstate(divide='ignore', invalid='ignore'):
            if self.kind == 'power':
                return a * np.log(r)
            if self.kind == 'classical_gaussian':
                return 2 * np.log(r) - math.log(2)
            if self.kind == 'exponential':
                return a * r
            if self.kind == 'scaled_exponential':
                return math.log(a) + r
            if self.kind == 'double_exponential':
                return np.exp(r)
            return np.log(self.phi(r))

    def phi(self, r):
        """Return φ(r). Overflows to ``inf`` for the exponential kinds."""
        r = np.asarray(r, dtype=float)

        if self.kind == 'fock_sobolev':
            # |z|^2/2 - m log|z|, the weight whose space is F^{p,m}.
            with np.errstate(divide='ignore'):
                return r ** 2 / 2 - self.param * np.log(r)

        with np.errstate(over='ignore'):
            return np.exp(self.log_phi(r))

    def log_phi_prime(self, r):
        """Return ``log φ′(r)`` for the kinds where φ′ > 0."""
        r = np.asarray(r, dtype=float)
        a = self.param

        with np.errstate(divide='ignore', invalid='ignore'):
            if self.kind == 'power':
                return math.log(a) + (a - 1) * np.log(r)
            if self.kind == 'classical_gaussian':
                return np.log(r)
            if self.kind == 'exponential':
                return math.log(a) + a * r
            if self.kind == 'scaled_exponential':
                return math.log(a) + r
            if self.kind == 'double_exponential':
                return r + np.exp(r)
            return np.log(self.phi_prime(r))

    def log_one_plus_phi_prime(self, r):
        """Return ``log(1 + φ′(r))`` without overflow."""
        r = np.asarray(r, dtype=float)

        if self.kind == 'fock_sobolev':
            with np.errstate(divide='ignore', invalid='ignore'):
                return np.log1p(self.phi_prime(r))

        return np.logaddexp(0.0, self.log_phi_prime(r))

    def phi_prime(self, r):
        """Return φ′(r)."""
        r = np.asarray(r, dtype=float)

        if self.kind == 'fock_sobolev':
            with np.errstate(divide='ignore'):
                return r - self.param / r

        with np.errstate(over='ignore'):
            return np.exp(self.log_phi_prime(r))

    def log_abs_phi_second(self, r):
        """Return ``(log|φ″(r)|, sign φ″(r))``."""
        r = np.asarray(r, dtype=float)
        a = self.param
        one = np.ones_like(r)

        with np.errstate(divide='ignore', over='ignore'):
            if self.kind == 'power':
                scale = a * (a - 1)
                log_scale = math.log(abs(scale)) if scale else -math.inf
                return (log_scale + (a - 2) * np.log(r),
                        np.sign(scale) * one)
            if self.kind == 'classical_gaussian':
                return np.zeros_like(r), one
            if self.kind == 'exponential':
                return 2 * math.log(a) + a * r, one
            if self.kind == 'scaled_exponential':
                return math.log(a) + r, one
            if self.kind == 'double_exponential':
                # (e^r + e^(2r)) e^(e^r)
                return r + np.exp(r) + np.log1p(np.exp(r)), one
            return np.log1p(a / r ** 2), one

    def phi_second(self, r):
        """Return φ″(r)."""
        log_abs, sign = self.log_abs_phi_second(r)

        with np.errstate(over='ignore'):
            return sign * np.exp(log_abs)

    def log_laplacian(self, r):
        """Return ``log Δφ(r)`` where ``Δφ = φ″ + φ′/r``, for ``r > 0``."""
        r = np.asarray(r, dtype=float)
        a = self.param

        with np.errstate(divide='ignore', invalid='ignore'):
            if self.kind == 'power':
                # φ″ + φ′/r = α² r^(α-2)
                return 2 * math.log(a) + (a - 2) * np.log(r)
            if self.kind == 'classical_gaussian':
                return np.full_like(r, math.log(2))
            if self.kind == 'exponential':
                return a * r + np.log(a * a + a / r)
            if self.kind == 'scaled_exponential':
                return math.log(a) + r + np.log1p(1 / r)
            if self.kind == 'double_exponential':
                # e^(e^r) e^r (1 + e^r + 1/r)
                return np.exp(r) + r + np.logaddexp(r, np.log1p(1 / r))
            # fock_sobolev: Δ(|z|^2/2 - m log|z|) = 2 away from the origin
            return np.full_like(r, math.log(2))

    def laplacian_at_zero(self):
        """Return the right limit of Δφ at ``r = 0``."""
        if self.kind == 'power':
            if self.param > 2:
                return 0.0
            if self.param == 2:
                return 4.0
            return math.inf
        if self.kind in ('classical_gaussian', 'fock_sobolev'):
            return 2.0
        return math.inf

    def finite_difference_check(self, radii, tol=1e-6, step=1e-5):
        """Check that φ′ and φ″ agree with central differences of φ and φ′.

        The step at radius ``r`` is ``step * (1 + r)``.

        Returns:
            list: ``(r, phi_prime_err, phi_second_err)`` for every radius
            where a relative error exceeds `tol`. Empty when consistent.
        """
        failures = []

        for r in np.asarray(radii, dtype=float):
            h = step * (1 + r)
            d1 = (self.phi(r + h) - self.phi(r - h)) / (2 * h)
            d2 = (self.phi_prime(r + h) - self.phi_prime(r - h)) / (2 * h)
            e1 = abs(d1 - self.phi_prime(r)) / (1 + abs(self.phi_prime(r)))
            e2 = abs(d2 - self.phi_second(r)) / (1 + abs(self.phi_second(r)))

            if not (e1 <= tol and e2 <= tol):
                failures.append((float(r), float(e1), float(e2)))

        return failures


def power(alpha):
    """Return the profile φ(r) = r^α."""
    return WeightProfile('power', alpha)


def exponential(beta):
    """Return the profile φ(r) = e^(βr)."""
    return WeightProfile('exponential', beta)


def double_exponential():
    """Return the profile φ(r) = e^(e^r)."""
    return WeightProfile('double_exponential')


def classical_gaussian():
    """Return the classical Fock weight φ(r) = r²/2."""
    return WeightProfile('classical_gaussian')


def scaled_exponential(c):
    """Return the profile φ(r) = c·e^r."""
    return WeightProfile('scaled_exponential', c)


def fock_sobolev_weight(m):
    """Return φ(r) = r²/2 − m log r, whose weighted space is F^{p,m}."""
    return WeightProfile('fock_sobolev', m)


def laplacian_radial(profile, r):
    """Return the radial Laplacian Δφ(r) = φ″(r) + φ′(r)/r.

    At ``r = 0`` the right limit of the built-in kind is used.

    Raises:
        WeightError: If the value is not finite.
    """
    if r < 0:
        raise WeightError('radius must be non-negative but found {!r}'
                          .format(r))

    if r == 0:
        value = profile.laplacian_at_zero()
    else:
        with np.errstate(over='ignore'):
            value = float(np.exp(profile.log_laplacian(r)))

    if not math.isfinite(value):
        raise WeightError('weight derivative overflow at r={!r}'.format(r))

    return value


def tau(profile, r, C=None):
    """Return the canonical τ(r): the plateau `C` below ``r = 1`` and
    ``Δφ(r)^(-1/2)`` from ``r = 1`` on.

    Args:
        profile (WeightProfile): The weight.
        r (float): Radius.
        C (float, optional): Plateau constant. Defaults to ``Δφ(1)^(-1/2)``
            which makes τ continuous at ``r = 1``.

    Raises:
        WeightError: If Δφ(r) is not positive.
    """
    if r < 1:
        if C is None:
            return tau(profile, 1.0)
        if not C > 0:
            raise WeightError('tau plateau must be positive but found {!r}'
                              .format(C))
        return float(C)

    log_lap = float(profile.log_laplacian(r))

    if math.isnan(log_lap) or log_lap == -math.inf:
        raise WeightError('weight not rapidly increasing at r={!r}'.format(r))

    return math.exp(-0.5 * log_lap)


class WeightDiagnostics(namedtuple('WeightDiagnostics', [
        'laplacian_positive',
        'tau_vanishes',
        'tau_monotone',
        'regularity_route',
        'regularity_exponent',
        'lemma26_divergence',
        'lemma28',
        'sample_grid',
        'failing_samples'])):
    """Numerical class-I diagnostics of a weight on a finite window.

    Attributes:
        laplacian_positive (bool): Δφ > 0 on the sample grid.
        tau_vanishes (bool): τ decays over the last quartile of the grid.
        tau_monotone (bool): τ strictly decreases over the last quartile.
        regularity_route (str): The satisfied regularity route.
        regularity_exponent (float|None): The exponent C of the power route.
        lemma26_divergence (bool): φ(r)/r² increases on the tail and grows
            tenfold between ``r_max/10`` and ``r_max``.
        lemma28 (Lemma28Flags|None): Admissibility flags when requested.
        sample_grid (list): ``(r, Δφ(r), τ(r))`` samples.
        failing_samples (dict): First failing radius per check.
    """
    @property
    def class_I(self):
        return bool(self.laplacian_positive and self.tau_vanishes and
                    self.regularity_route != ROUTE_NEITHER)

    def to_dict(self):
        data = self._asdict()
        data['class_I'] = self.class_I
        data['lemma28'] = (None if self.lemma28 is None
                           else self.lemma28._asdict())
        data['sample_grid'] = [list(row) for row in self.sample_grid]
        return data


class Lemma28Flags(namedtuple('Lemma28Flags', [
        'phi_prime_nonzero',
        'boundary_decay',
        'quotient_bracket',
        'bracket'])):
    """Admissibility of a weight for the derivative norm equivalence.

    Attributes:
        phi_prime_nonzero (bool): φ′ ≠ 0 on the tail grid.
        boundary_decay (bool): ``r e^(-pφ)/φ′`` is below ``1e-12`` at r_max.
        quotient_bracket (bool): The observed range of ``(1/r)(r/φ′)′`` on
            the tail is finite and below p.
        bracket (tuple): ``(liminf, limsup)`` estimates.
    """
    @property
    def admissible(self):
        return bool(self.phi_prime_nonzero and self.boundary_decay and
                    self.quotient_bracket)


def classify_weight(profile, r_max=100.0, n_samples=64, p=None):
    """Diagnose membership of a weight in the class of rapidly increasing
    weights on the window ``[0.01, r_max]``.

    Args:
        profile (WeightProfile): The weight.
        r_max (float, optional): End of the window, at least 10.
        n_samples (int, optional): Number of log-spaced samples, at least 16.
        p (float, optional): When given, also run :func:`lemma28_admissible`.

    Returns:
        WeightDiagnostics
    """
    if r_max < 10:
        raise WeightError('r_max must be at least 10 but found {!r}'
                          .format(r_max))
    if n_samples < 16:
        raise WeightError('n_samples must be at least 16 but found {!r}'
                          .format(n_samples))

    radii = np.geomspace(0.01, r_max, n_samples)
    log_lap = profile.log_laplacian(radii)
    failing = {}

    with np.errstate(over='ignore'):
        lap = np.exp(log_lap)

    positive = np.isfinite(log_lap) | (log_lap == np.inf)
    laplacian_positive = bool(np.all(positive))
    if not laplacian_positive:
        failing['laplacian_positive'] = float(radii[~positive][0])

    plateau = float(np.exp(-0.5 * profile.log_laplacian(1.0)))
    log_tau = np.where(radii < 1, math.log(plateau), -0.5 * log_lap)
    taus = np.exp(log_tau)

    outer = radii >= 1
    tail = radii[outer]
    tail_log_tau = log_tau[outer]
    quartile = max(len(tail) // 4, 2)
    last = tail_log_tau[-quartile:]

    tau_vanishes = bool(last[-1] < last[0] and
                        tail_log_tau[-1] <= tail_log_tau[0] - math.log(2))
    if not tau_vanishes:
        failing['tau_vanishes'] = float(tail[-1])

    tau_monotone = bool(np.all(np.diff(last) < 0))
    if tau_vanishes and not tau_monotone:
        logger.warning('tau of %s vanishes but is not monotone on the tail',
                       profile.label)

    route, exponent = _regularity_route(tail, tail_log_tau)
    if route == ROUTE_NEITHER:
        failing['regularity_route'] = float(tail[-1])

    divergence = _lemma26_divergence(profile, r_max)
    if not divergence:
        failing['lemma26_divergence'] = float(r_max)

    flags = None if p is None else lemma28_admissible(profile, p, r_max)

    sample_grid = [(float(r), float(d), float(t))
                   for r, d, t in zip(radii, lap, taus)]

    diagnostics = WeightDiagnostics(
        laplacian_positive=laplacian_positive,
        tau_vanishes=tau_vanishes,
        tau_monotone=tau_monotone,
        regularity_route=route,
        regularity_exponent=exponent,
        lemma26_divergence=divergence,
        lemma28=flags,
        sample_grid=sample_grid,
        failing_samples=failing)

    logger.info('classified %s on [0.01, %s]: class_I=%s route=%s',
                profile.label, r_max, diagnostics.class_I, route)

    return diagnostics


def _regularity_route(radii, log_tau):
    half = radii[len(radii) // 2:]
    half_log_tau = log_tau[len(radii) // 2:]
    log_r = np.log(half)

    for exponent in REGULARITY_EXPONENTS:
        if np.all(np.diff(half_log_tau + exponent * log_r) > 0):
            return ROUTE_TAU_POWER, exponent

    # τ′ log(1/τ) computed as τ · (log τ)′ · log(1/τ) in the log domain.
    dlog = np.gradient(half_log_tau, half)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        log_g = (half_log_tau + np.log(np.abs(dlog)) +
                 np.log(np.abs(half_log_tau)))
        g = np.where(np.isfinite(log_g), np.exp(log_g), 0.0)

    quartile = max(len(g) // 2, 2)
    if g[-1] <= 1e-3 and g[-1] <= g[-quartile]:
        return ROUTE_TAU_LOG, None

    return ROUTE_NEITHER, None


def _lemma26_divergence(profile, r_max):
    # log(φ(r)/r²) on [r_max/10, r_max]
    radii = np.linspace(r_max / 10, r_max, 32)
    with np.errstate(over='ignore', invalid='ignore'):
        values = profile.log_phi(radii) - 2 * np.log(radii)

    if np.any(np.isnan(values)):
        return False

    increasing = bool(np.all(np.diff(values) > 0) or
                      np.all(values[1:] == np.inf))

    return increasing and bool(values[-1] - values[0] >= math.log(10) - 1e-9)


def lemma28_admissible(profile, p, r_max=50.0):
    """Check the hypotheses of the derivative norm equivalence on the tail
    grid ``[r_max/2, r_max]``.

    Args:
        profile (WeightProfile): The weight.
        p (float): Exponent, at least 1.
        r_max (float, optional): End of the window.

    Returns:
        Lemma28Flags
    """
    if p < 1:
        raise WeightError('p must be at least 1 but found {!r}'.format(p))

    radii = np.linspace(r_max / 2, r_max, 64)

    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        log_d1 = profile.log_phi_prime(radii)
        nonzero = bool(np.all(np.isfinite(log_d1) | (log_d1 == np.inf)))

        phi_end = profile.phi(r_max)
        log_boundary = (math.log(r_max) - p * phi_end -
                        float(profile.log_phi_prime(r_max)))
        decay = bool(log_boundary <= math.log(1e-12))

        # (1/r)(r/φ′)′ = 1/(rφ′) − φ″/φ′²
        first = np.exp(-np.log(radii) - log_d1)
        log_d2, sign_d2 = profile.log_abs_phi_second(radii)
        second = sign_d2 * np.exp(log_d2 - 2 * log_d1)
        quotient = first - second

    finite = np.isfinite(quotient)
    if np.any(finite):
        lower = float(np.min(quotient[finite]))
        upper = float(np.max(quotient[finite]))
    else:
        lower, upper = -math.inf, math.inf

    bracket = bool(np.all(finite) and lower > -math.inf and upper < p)

    return Lemma28Flags(phi_prime_nonzero=nonzero,
                        boundary_decay=decay,
                        quotient_bracket=bracket,
                        bracket=(lower, upper))

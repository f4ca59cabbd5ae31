"""The quadrature module.

Planar integrals over ℂ on polar grids, segment integrals from the origin
and the weighted Fock norms built on them.

Radial panels are appended outward until the integrand mass becomes
negligible. A norm whose integrand stops decaying is reported as not
converged instead of raising: "not in the space" is a result.
"""

from collections import namedtuple
from functools import lru_cache
import hashlib
import json
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .base import ConfigError
from . import entire
from .weights import WeightProfile, classical_gaussian


logger = logging.getLogger(__name__)

GAUSS_LEGENDRE_PANELS = 'gauss_legendre_panels'
TRAPEZOID_GEOMETRIC = 'trapezoid_geometric'
RADIAL_RULES = (GAUSS_LEGENDRE_PANELS, TRAPEZOID_GEOMETRIC)

#: Width growth factor between consecutive trapezoid panels.
GEOMETRIC_GROWTH = 1.5

#: Consecutive panels below tolerance required to stop.
QUIET_PANELS = 2

#: Consecutive positive, non-decreasing log-mass increments that mark an
#: integrand growing faster than exponentially in r.
DIVERGENCE_INCREMENTS = 3

AUTO = 'auto'


class QuadratureConfig(namedtuple('QuadratureConfig', [
        'n_radial',
        'n_angular',
        'r_max',
        'radial_rule',
        'tail_tol',
        'segment_nodes',
        'panel_width',
        'r_cap',
        'max_panels'])):
    """Grid configuration shared by every quadrature.

    Attributes:
        n_radial (int): Radial nodes per panel, at least 32.
        n_angular (int): Equispaced angles, at least 64.
        r_max (str|float): ``'auto'`` to append panels until the tail is
            negligible, or a fixed outer radius.
        radial_rule (str): ``'gauss_legendre_panels'`` or
            ``'trapezoid_geometric'``.
        tail_tol (float): Relative tolerance of the stopping rule.
        segment_nodes (int): Gauss-Legendre nodes of segment integrals, at
            least 16.
        panel_width (float): Width of a radial panel (first panel for the
            geometric rule).
        r_cap (float): Hard radius cap for ``'auto'``.
        max_panels (int): Hard panel count cap for ``'auto'``.
    """
    __slots__ = ()

    def __new__(cls, n_radial=256, n_angular=256, r_max=AUTO,
                radial_rule=GAUSS_LEGENDRE_PANELS, tail_tol=1e-10,
                segment_nodes=64, panel_width=1.0, r_cap=1e4, max_panels=200):
        self = super().__new__(cls, n_radial, n_angular, r_max, radial_rule,
                               tail_tol, segment_nodes, panel_width, r_cap,
                               max_panels)
        self.validate()
        return self

    def validate(self):
        """Raise :class:`.ConfigError` naming the first invalid field."""
        if self.n_radial < 32:
            raise ConfigError('must be at least 32', field='n_radial')
        if self.n_angular < 64:
            raise ConfigError('must be at least 64', field='n_angular')
        if self.segment_nodes < 16:
            raise ConfigError('must be at least 16', field='segment_nodes')
        if self.radial_rule not in RADIAL_RULES:
            raise ConfigError('must be one of {}'.format(list(RADIAL_RULES)),
                              field='radial_rule')
        if self.r_max != AUTO and not (isinstance(self.r_max, (int, float))
                                       and self.r_max > 0):
            raise ConfigError("must be 'auto' or a positive radius",
                              field='r_max')
        if not 0 < self.tail_tol < 1:
            raise ConfigError('must lie in (0, 1)', field='tail_tol')
        if not self.panel_width > 0:
            raise ConfigError('must be positive', field='panel_width')
        if not self.r_cap > self.panel_width:
            raise ConfigError('must exceed panel_width', field='r_cap')
        if self.max_panels < QUIET_PANELS:
            raise ConfigError('must be at least {}'.format(QUIET_PANELS),
                              field='max_panels')

    @property
    def auto(self):
        return self.r_max == AUTO

    def replace(self, **fields):
        """Return a validated copy with `fields` replaced."""
        data = self._asdict()
        data.update(fields)
        return self.__class__(**data)

    def scaled(self, factor):
        """Return a copy with both grid sizes multiplied by `factor`."""
        if not factor > 0:
            raise ConfigError('must be positive', field='grid_scale')
        return self.replace(
            n_radial=max(32, int(round(self.n_radial * factor))),
            n_angular=max(64, int(round(self.n_angular * factor))))

    def to_dict(self):
        return dict(self._asdict())

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def config_hash(self):
        """Return a short digest of the configuration."""
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


class SpaceSpec(namedtuple('SpaceSpec', ['weight', 'p', 'q', 'm'])):
    """A weighted function space.

    Attributes:
        weight (WeightProfile): Radial weight φ.
        p (float): Exponent in ``(0, ∞]``; ``math.inf`` is the sup norm.
        q (float): Power of φ in the density (``F^{p,q}_φ``).
        m (int): Sobolev order (``F^{p,m}``).
    """
    __slots__ = ()

    def __new__(cls, weight=None, p=2, q=0, m=0):
        if weight is None:
            weight = classical_gaussian()
        self = super().__new__(cls, weight, float(p), float(q), m)
        self.validate()
        return self

    def validate(self):
        if not isinstance(self.weight, WeightProfile):
            raise ConfigError('must be a WeightProfile', field='weight')
        if not self.p > 0:
            raise ConfigError('must be positive', field='p')
        if self.q and self.weight.is_classical:
            raise ConfigError('q != 0 needs a non-classical weight',
                              field='q')
        if not (isinstance(self.m, int) and self.m >= 0):
            raise ConfigError('must be a non-negative integer', field='m')
        if self.p < 1:
            logger.warning('p=%s < 1: the norm is a quasi-norm', self.p)

    @property
    def is_sup(self):
        return math.isinf(self.p)

    def to_dict(self):
        return {'weight': self.weight.to_dict(),
                'p': 'inf' if self.is_sup else self.p,
                'q': self.q,
                'm': self.m}


class IntegralResult(namedtuple('IntegralResult', [
        'value', 'tail_estimate', 'converged', 'diagnostics'])):
    """The result of a planar integral.

    Attributes:
        value (float|complex|ndarray): The integral (partial when not
            converged).
        tail_estimate (float): Absolute mass of the last panel.
        converged (bool): Whether the stopping rule was met.
        diagnostics (dict): Panel count, outer radius, peak radius, last
            panel ratio and the stop reason.
    """
    @property
    def peak_radius(self):
        return self.diagnostics['peak_radius']


class NormResult(namedtuple('NormResult', [
        'value', 'tail_estimate', 'converged', 'peak_radius',
        'diagnostics'])):
    """A weighted norm.

    Attributes:
        value (float): The norm itself, not its p-th power.
        tail_estimate (float): Tail bound on the power-integrand scale.
        converged (bool): Whether the quadrature converged.
        peak_radius (float): Radius where the radial integrand is maximal.
        diagnostics (dict): Quadrature details.
    """
    def to_dict(self):
        return {'value': self.value,
                'tail': self.tail_estimate,
                'converged': self.converged,
                'peak_radius': self.peak_radius}


class FockSobolevResult(namedtuple('FockSobolevResult', [
        'direct', 'equivalent', 'converged'])):
    """The two Fock-Sobolev norms of a function.

    Attributes:
        direct (float): ``Σ_(α≤m) ‖f^(α)‖_p``.
        equivalent (float): ``‖z^m f‖_p``.
        converged (bool): Whether every summand converged.
    """
    pass


class EquivalenceResult(namedtuple('EquivalenceResult', [
        'ratio', 'middle', 'reference', 'converged'])):
    """An observed norm equivalence ratio ``middle / reference``."""
    pass


class TailDominance(namedtuple('TailDominance', [
        'ratio', 'full', 'tail', 'converged'])):
    """Ratio of the full integral to the integral over ``|z| >= R``."""
    pass


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Return Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = leggauss(n)
    return (x + 1) / 2, w / 2


def radial_panels(cfg, r_min=0.0):
    """Yield ``(a, b, nodes, weights)`` for the radial panels of `cfg`
    starting at `r_min`.
    """
    a = float(r_min)
    index = 0

    while True:
        if cfg.radial_rule == GAUSS_LEGENDRE_PANELS:
            width = cfg.panel_width
        else:
            width = cfg.panel_width * GEOMETRIC_GROWTH ** index

        b = a + width
        if not cfg.auto:
            b = min(b, float(cfg.r_max))

        if cfg.radial_rule == GAUSS_LEGENDRE_PANELS:
            t, w = gauss_legendre(cfg.n_radial)
            nodes, weights = a + (b - a) * t, (b - a) * w
        else:
            nodes = np.linspace(a, b, cfg.n_radial)
            h = (b - a) / (cfg.n_radial - 1)
            weights = np.full(cfg.n_radial, h)
            weights[[0, -1]] = h / 2

        yield a, b, nodes, weights

        if not cfg.auto and b >= cfg.r_max:
            return

        a = b
        index += 1


def angular_grid(cfg):
    """Return the equispaced angles and their spacing."""
    theta = 2 * np.pi * np.arange(cfg.n_angular) / cfg.n_angular
    return theta, 2 * np.pi / cfg.n_angular


def plane_integral(g, cfg, r_min=0.0):
    """Integrate `g` over the plane (or over ``|z| >= r_min``).

    The integrand is evaluated panel by panel on a polar grid. Within a
    panel, values are summed over angles then over radii. With
    ``r_max='auto'`` panels are appended until two consecutive panels each
    carry an absolute mass below ``tail_tol`` times the running total.

    Args:
        g (callable): Integrand mapping an array of points of shape
            ``(n_r, n_θ)`` to values of the same shape, or of shape
            ``(components, n_r, n_θ)`` for a vector integrand. Values may be
            complex.
        cfg (QuadratureConfig): Grid configuration.
        r_min (float, optional): Inner radius. Defaults to ``0``.

    Returns:
        IntegralResult
    """
    theta, dtheta = angular_grid(cfg)
    rotor = np.exp(1j * theta)

    total = 0.0
    abs_total = 0.0
    masses = []
    quiet = 0
    peak_density, peak_radius = -1.0, float(r_min)
    converged = False
    reason = 'radius limit'
    b = r_min

    for index, (a, b, r, w) in enumerate(radial_panels(cfg, r_min)):
        z = r[:, None] * rotor[None, :]

        with np.errstate(over='ignore', invalid='ignore'):
            values = np.asarray(g(z))
            ring = values.sum(axis=-1) * dtheta
            contribution = (ring * (w * r)).sum(axis=-1)
            density = np.abs(ring) * r
            if density.ndim > 1:
                density = density.sum(axis=tuple(range(density.ndim - 1)))
            mass = float(np.sum(density * w))

        if not (np.all(np.isfinite(contribution)) and math.isfinite(mass)):
            reason = 'non-finite integrand'
            masses.append(math.inf)
            logger.debug('non-finite integrand in panel [%g, %g]', a, b)
            break

        top = int(np.argmax(density))
        if density[top] > peak_density:
            peak_density, peak_radius = float(density[top]), float(r[top])

        total = total + contribution
        abs_total += mass
        masses.append(mass)
        logger.debug('panel %d [%g, %g]: mass %.6g, total %.6g',
                     index, a, b, mass, abs_total)

        if not cfg.auto:
            continue

        quiet = quiet + 1 if mass <= cfg.tail_tol * abs_total else 0
        if quiet >= QUIET_PANELS:
            converged = True
            reason = 'tail below tolerance'
            break

        with np.errstate(divide='ignore'):
            if _growing(np.log(masses)):
                reason = 'divergent integrand'
                break

        if b >= cfg.r_cap or index + 1 >= cfg.max_panels:
            reason = 'radius limit'
            break

    if not cfg.auto and reason == 'radius limit' and masses:
        converged = math.isfinite(masses[-1])
        reason = 'fixed radius'
        if masses[-1] > cfg.tail_tol * abs_total:
            logger.debug('fixed radius %s: last panel not negligible',
                         cfg.r_max)

    last_ratio = None
    if len(masses) >= 2 and masses[-2] > 0:
        last_ratio = masses[-1] / masses[-2]

    if not converged:
        logger.debug('plane integral stopped at r=%g: %s (last ratio %s)',
                     b, reason, last_ratio)

    diagnostics = {'panels': len(masses),
                   'r_end': float(b),
                   'peak_radius': peak_radius,
                   'last_ratio': last_ratio,
                   'reason': reason}

    return IntegralResult(_scalar(total), masses[-1] if masses else 0.0,
                          converged, diagnostics)


def segment_integral(h, z, nodes=64):
    """Return ``∫_0^z h(ζ) dζ`` along the straight segment, by
    Gauss-Legendre on ``ζ(t) = tz``.

    Args:
        h (callable): Integrand, vectorized over arrays of points.
        z (complex|ndarray): Endpoint or array of endpoints.
        nodes (int, optional): Number of nodes. Defaults to ``64``.
    """
    t, w = gauss_legendre(nodes)
    z = np.asarray(z, dtype=complex)
    values = np.asarray(h(np.multiply.outer(t, z)))
    return _scalar(z * np.tensordot(w, values, axes=1))


def log_weight(profile, r, p, q=0.0):
    """Return ``log(e^(-pφ(r)) φ(r)^q)``."""
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        value = -p * profile.phi(r)
        if q:
            value = value + q * profile.log_phi(r)
    return value


def weighted_norm(f, space, cfg):
    """Return the norm of `f` in `space`.

    For finite ``p`` the norm is the ``1/p`` power of the planar integral of
    ``exp(p log|f| - pφ + q log φ)``. For ``p = ∞`` it is the sup of
    ``|f| e^(-φ) φ^q`` over the origin and the polar grid, extended until two
    consecutive panels fall below ``tail_tol`` times the running max. With
    ``m > 0`` the norms of ``f, f′, ..., f^(m)`` are summed.

    Args:
        f (EntireFunction): The function.
        space (SpaceSpec): The space.
        cfg (QuadratureConfig): Grid configuration.

    Returns:
        NormResult
    """
    if space.m:
        parts = [weighted_norm(f.derivative(order), space._replace(m=0), cfg)
                 for order in range(space.m + 1)]
        return NormResult(
            sum(part.value for part in parts),
            sum(part.tail_estimate for part in parts),
            all(part.converged for part in parts),
            parts[0].peak_radius,
            {'parts': [part.to_dict() for part in parts]})

    if space.is_sup:
        return _sup_norm(f, space, cfg)

    profile, p, q = space.weight, space.p, space.q

    def integrand(z):
        log_value = p * f.log_abs(z) + log_weight(profile, np.abs(z), p, q)
        return np.exp(np.where(np.isnan(log_value), np.inf, log_value))

    result = plane_integral(integrand, cfg)
    value = math.inf
    if result.converged:
        value = float(result.value) ** (1 / p)

    logger.info('norm of %s in F^%s (q=%s) under %s: %s (%s)',
                f.type_name, p, q, profile.label, value,
                result.diagnostics['reason'])

    return NormResult(value, result.tail_estimate, result.converged,
                      result.peak_radius, result.diagnostics)


def _sup_norm(f, space, cfg):
    profile, q = space.weight, space.q

    def log_sample(z):
        log_value = f.log_abs(z) + log_weight(profile, np.abs(z), 1.0, q)
        return np.where(np.isnan(log_value), np.inf, log_value)

    origin = float(log_sample(np.zeros(1, dtype=complex))[0])
    best, best_radius = origin, 0.0
    theta, _ = angular_grid(cfg)
    rotor = np.exp(1j * theta)
    peaks = []
    quiet = 0
    converged = False
    reason = 'radius limit'
    last = -math.inf
    b = 0.0

    for index, (a, b, r, _) in enumerate(radial_panels(cfg)):
        samples = log_sample(r[:, None] * rotor[None, :])
        rows = samples.max(axis=1)
        top = int(np.argmax(rows))
        last = float(rows[top])

        if not math.isfinite(last) and last > 0:
            reason = 'non-finite integrand'
            break

        if last > best:
            best, best_radius = last, float(r[top])

        peaks.append(last)

        if not cfg.auto:
            continue

        quiet = quiet + 1 if last <= best + math.log(cfg.tail_tol) else 0
        if quiet >= QUIET_PANELS:
            converged = True
            reason = 'tail below tolerance'
            break

        if _growing(peaks):
            reason = 'divergent integrand'
            break

        if b >= cfg.r_cap or index + 1 >= cfg.max_panels:
            break

    if not cfg.auto and peaks:
        converged = True
        reason = 'fixed radius'

    value = math.exp(best) if converged else math.inf
    diagnostics = {'panels': len(peaks), 'r_end': float(b),
                   'peak_radius': best_radius, 'reason': reason}

    logger.info('sup norm under %s: %s at r=%s (%s)', profile.label, value,
                best_radius, reason)

    return NormResult(value, math.exp(last) if peaks else 0.0, converged,
                      best_radius, diagnostics)


def fock_sobolev_norm(f, p, m, cfg):
    """Return the direct and the equivalent Fock-Sobolev norms of `f`.

    Args:
        f (EntireFunction): The function.
        p (float): Exponent.
        m (int): Sobolev order, at least 1.
        cfg (QuadratureConfig): Grid configuration.

    Returns:
        FockSobolevResult
    """
    if m < 1:
        raise ConfigError('must be at least 1', field='m')

    classical = SpaceSpec(classical_gaussian(), p)
    direct = weighted_norm(f, classical._replace(m=m), cfg)
    equivalent = weighted_norm(entire.Product(entire.monomial(m), f),
                               classical, cfg)

    return FockSobolevResult(direct.value, equivalent.value,
                             direct.converged and equivalent.converged)


def lemma22_equivalence_check(f, p, m, cfg):
    """Compare ``‖f‖_p`` with the derivative-based quantity

    ``Σ_(α<m) |f^(α)(0)|
    + (∫ |f^(m)(z) (1+|z|)^(-m) e^(-|z|²/2)|^p dm)^(1/p)``.

    Returns:
        EquivalenceResult: ``ratio = middle / ‖f‖_p``.
    """
    if m < 1:
        raise ConfigError('must be at least 1', field='m')

    reference = weighted_norm(f, SpaceSpec(classical_gaussian(), p), cfg)

    head = sum(abs(f.derivative(order).evaluate(0)) for order in range(m))
    top = f.derivative(m)

    def integrand(z):
        r = np.abs(z)
        return np.exp(p * (top.log_abs(z) - m * np.log1p(r) - r * r / 2))

    tail = plane_integral(integrand, cfg)
    middle = head + tail.value ** (1 / p)
    converged = reference.converged and tail.converged
    ratio = middle / reference.value if reference.value else math.inf

    return EquivalenceResult(ratio, middle, reference.value, converged)


def tail_dominance(f, space, cfg, R=1.0):
    """Return the ratio of the full norm integral of `f` to its part over
    ``|z| >= R``.
    """
    profile, p, q = space.weight, space.p, space.q

    def integrand(z):
        return np.exp(p * f.log_abs(z) + log_weight(profile, np.abs(z), p, q))

    full = plane_integral(integrand, cfg)
    tail = plane_integral(integrand, cfg, r_min=R)
    ratio = full.value / tail.value if tail.value else math.inf

    return TailDominance(ratio, full.value, tail.value,
                         full.converged and tail.converged)


def classical_inner_product(f, g, cfg):
    """Return ``(1/π) ∫ f(z) conj(g(z)) e^(-|z|²) dm(z)``."""
    def integrand(z):
        return f(z) * np.conj(g(z)) * np.exp(-np.abs(z) ** 2)

    result = plane_integral(integrand, cfg)
    if not result.converged:
        logger.warning('classical inner product did not converge: %s',
                       result.diagnostics['reason'])

    return complex(result.value) / math.pi


def _growing(log_masses):
    if len(log_masses) < DIVERGENCE_INCREMENTS + 1:
        return False

    with np.errstate(invalid='ignore'):
        steps = np.diff(np.asarray(log_masses[-DIVERGENCE_INCREMENTS - 1:]))

    return bool(np.all(np.isfinite(steps)) and np.all(steps > 0) and
                np.all(np.diff(steps) >= 0))


def _scalar(value):
    value = np.asarray(value)
    if value.ndim == 0:
        return value.item()
    return value

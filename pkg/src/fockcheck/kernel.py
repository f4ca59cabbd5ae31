"""The kernel module.

The reproducing kernel of the weighted Fock space ``F²_φ`` built from the
orthogonal monomial basis ``e_n(z) = z^n / δ_n`` where

    δ_n² = 2π ∫_0^∞ r^(2n+1) e^(-2φ(r)) dr.

The kernel is used in the Hermitian form ``K(z, ζ) = Σ (z ζ̄)^n / δ_n²``,
holomorphic in ``z`` and anti-holomorphic in ``ζ``, so that
``f(ζ) = ∫ f(z) K(ζ, z) e^(-2φ(z)) dm(z)``.
"""

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import logging
import math

import numpy as np
from scipy.optimize import bisect

from .base import ConditionError, MomentError, SeriesTruncationError
from .entire import PowerSeries
from .quadrature import gauss_legendre, log_weight, plane_integral
from .weights import WeightProfile, lemma28_admissible


logger = logging.getLogger(__name__)

#: Relative size of the last kernel term accepted by :func:`kernel_eval`.
KERNEL_TAIL_TOL = 1e-14

#: Half-width of the moment integration window in units of the peak width.
MOMENT_WINDOW = 40.0

#: Sub-panels of the moment integration window.
MOMENT_PANELS = 8

#: Integrand drop (in log units) required at the window ends.
MOMENT_EDGE_DROP = 40.0

#: Largest radius searched for the moment integrand peak.
MOMENT_PEAK_CAP = 1e6


class KernelBasis(namedtuple('KernelBasis', [
        'profile', 'N', 'log_delta_sq', 'peaks', 'tail_ratio'])):
    """The truncated orthogonal basis of ``F²_φ``.

    Attributes:
        profile (WeightProfile): The weight φ.
        N (int): Truncation degree.
        log_delta_sq (ndarray): ``log δ_n²`` for ``n = 0..N``.
        peaks (ndarray): Radii where the moment integrands peak.
        tail_ratio (float): ``δ_(N-1)² / δ_N²``, the ratio of the last two
            kernel coefficients.
    """
    @property
    def delta_sq(self):
        return np.exp(self.log_delta_sq)

    @property
    def inverse_delta_sq(self):
        return np.exp(-self.log_delta_sq)

    def to_dict(self):
        return {'profile': self.profile.to_dict(),
                'N': self.N,
                'log_delta_sq': [float(x) for x in self.log_delta_sq],
                'peaks': [float(x) for x in self.peaks],
                'tail_ratio': self.tail_ratio}

    @classmethod
    def from_dict(cls, data):
        return cls(WeightProfile.from_dict(data['profile']), data['N'],
                   np.array(data['log_delta_sq']), np.array(data['peaks']),
                   data['tail_ratio'])


class IdentityCheck(namedtuple('IdentityCheck', [
        'lhs', 'rhs', 'rel_err', 'converged'])):
    """Both sides of a numerically checked identity."""
    @property
    def ratio(self):
        return self.lhs / self.rhs if self.rhs else math.inf


class ReproduceCheck(namedtuple('ReproduceCheck', [
        'reproduced', 'reference', 'rel_err', 'converged'])):
    """A reproducing formula evaluated by quadrature against the exact
    value.
    """
    pass


class NormRatio(namedtuple('NormRatio', [
        'ratio', 'middle', 'norm_power', 'converged'])):
    """The ratio ``middle / ‖f‖^p`` of a norm equivalence."""
    pass


def moment_peak(profile, n):
    """Return the radius where ``r^(2n+1) e^(-2φ(r))`` is maximal, solving
    ``(2n+1)/r = 2φ′(r)`` by bisection.

    Raises:
        MomentError: If no peak exists below :const:`MOMENT_PEAK_CAP`.
    """
    log_rate = math.log(2 * n + 1) - math.log(2)

    def slope(r):
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            log_d1 = float(profile.log_phi_prime(r))
        if math.isnan(log_d1) or log_d1 == -math.inf:
            return 1.0
        return log_rate - math.log(r) - log_d1

    lo, hi = 1e-12, 1.0
    while slope(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > MOMENT_PEAK_CAP:
            raise MomentError('moment diverges at n={}'.format(n))

    return bisect(slope, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def log_moment(profile, n, cfg):
    """Return ``log δ_n²`` and the integrand peak radius.

    The integral is taken in the log domain on Gauss-Legendre sub-panels of
    a window of :const:`MOMENT_WINDOW` peak widths around the peak, widened
    until the integrand at the window ends is negligible.

    Raises:
        MomentError: If the window cannot be made wide enough.
    """
    peak = moment_peak(profile, n)

    log_d2, sign_d2 = profile.log_abs_phi_second(peak)
    with np.errstate(over='ignore'):
        curvature = (2 * n + 1) / peak ** 2 + 2 * float(sign_d2 *
                                                        np.exp(log_d2))
    sigma = 1 / math.sqrt(curvature) if curvature > 0 else peak

    def log_integrand(r):
        with np.errstate(divide='ignore', over='ignore'):
            return (2 * n + 1) * np.log(r) + log_weight(profile, r, 2.0)

    half_width = MOMENT_WINDOW * sigma
    t, w = gauss_legendre(cfg.n_radial)
    log_top = float(log_integrand(peak))

    for _ in range(6):
        a, b = max(0.0, peak - half_width), peak + half_width
        ends = [log_integrand(b)]
        if a > 0:
            ends.append(log_integrand(a))

        if all(end <= log_top - MOMENT_EDGE_DROP for end in ends):
            edges = np.linspace(a, b, MOMENT_PANELS + 1)
            nodes = np.concatenate([lo + (hi - lo) * t
                                    for lo, hi in zip(edges, edges[1:])])
            weights = np.concatenate([(hi - lo) * w
                                      for lo, hi in zip(edges, edges[1:])])
            values = log_integrand(nodes)
            top = float(np.max(values))
            total = float(np.sum(weights * np.exp(values - top)))

            if not (math.isfinite(top) and total > 0):
                break

            return math.log(2 * math.pi) + top + math.log(total), peak

        half_width *= 2

    raise MomentError('moment diverges at n={}'.format(n))


def compute_deltas(profile, N, cfg, workers=None):
    """Build the :class:`KernelBasis` of `profile` truncated at degree `N`.

    Args:
        profile (WeightProfile): Class-I or classical weight.
        N (int): Truncation degree, non-negative.
        cfg (QuadratureConfig): Grid configuration (``n_radial`` nodes per
            sub-panel).
        workers (int, optional): Thread count for the independent moments.

    Returns:
        KernelBasis
    """
    if N < 0:
        raise ValueError('N must be non-negative but found {!r}'.format(N))

    degrees = range(N + 1)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            moments = list(executor.map(
                lambda n: log_moment(profile, n, cfg), degrees))
    else:
        moments = [log_moment(profile, n, cfg) for n in degrees]

    log_delta_sq = np.array([m[0] for m in moments])
    peaks = np.array([m[1] for m in moments])
    tail_ratio = (math.exp(log_delta_sq[-2] - log_delta_sq[-1])
                  if N >= 1 else 0.0)

    logger.info('computed %d moments of %s (log δ_N² = %.6g)', N + 1,
                profile.label, log_delta_sq[-1])

    return KernelBasis(profile, N, log_delta_sq, peaks, tail_ratio)


def kernel_eval(basis, z, zeta):
    """Return ``K(z, ζ) = Σ_(n≤N) (z ζ̄)^n / δ_n²``.

    Terms are accumulated in ascending ``n`` so that
    ``kernel_eval(basis, ζ, z) == conj(kernel_eval(basis, z, ζ))`` exactly.

    Raises:
        SeriesTruncationError: If the last term exceeds
            :const:`KERNEL_TAIL_TOL` times the sum.
    """
    w = complex(z) * complex(zeta).conjugate()
    inverse = basis.inverse_delta_sq

    total = 0j
    power = 1 + 0j
    term = 0j

    for n in range(basis.N + 1):
        if n:
            power = power * w
        term = power * float(inverse[n])
        total = total + term

    if abs(term) > KERNEL_TAIL_TOL * abs(total):
        raise SeriesTruncationError(
            'kernel truncation insufficient at |zζ|={:.6g} (N={})'
            .format(abs(w), basis.N))

    return total


def kernel_values(basis, z, zeta):
    """Return the truncated ``K(z, ζ)`` on broadcast arrays, uncertified."""
    w = np.asarray(z, dtype=complex) * np.conj(np.asarray(zeta, dtype=complex))
    inverse = basis.inverse_delta_sq

    total = np.zeros_like(w)
    power = np.ones_like(w)

    for n in range(basis.N + 1):
        if n:
            power = power * w
        total = total + power * inverse[n]

    return total


def kernel_series(basis, eta):
    """Return ``ζ ↦ K(ζ, η) = Σ (ζ η̄)^n / δ_n²`` as a power series in ζ."""
    conj_eta = complex(eta).conjugate()
    coeffs = np.zeros(basis.N + 1, dtype=complex)
    power = 1 + 0j

    for n in range(basis.N + 1):
        if n:
            power = power * conj_eta
        coeffs[n] = power * basis.inverse_delta_sq[n]

    return PowerSeries(coeffs)


def kernel_slot_derivative(basis, eta):
    """Return ``ζ ↦ conj(∂_η K(η, ζ)) = Σ_(n≥1) n η̄^(n-1) ζ^n / δ_n²`` as a
    power series in ζ.
    """
    conj_eta = complex(eta).conjugate()
    coeffs = np.zeros(basis.N + 1, dtype=complex)
    power = 1 + 0j

    for n in range(1, basis.N + 1):
        if n > 1:
            power = power * conj_eta
        coeffs[n] = n * power * basis.inverse_delta_sq[n]

    return PowerSeries(coeffs)


def reproduce_check(basis, f, zeta, cfg):
    """Compare ``∫ f(z) K(ζ, z) e^(-2φ(z)) dm(z)`` with ``f(ζ)``.

    Returns:
        ReproduceCheck
    """
    profile = basis.profile

    def integrand(z):
        weight = np.exp(log_weight(profile, np.abs(z), 2.0))
        return f(z) * kernel_values(basis, zeta, z) * weight

    result = plane_integral(integrand, cfg)
    reproduced = complex(result.value)
    reference = complex(f(zeta))
    rel_err = _rel_err(reproduced, reference)

    logger.info('reproduced f(%s) = %s against %s (rel err %.3g)', zeta,
                reproduced, reference, rel_err)

    return ReproduceCheck(reproduced, reference, rel_err, result.converged)


def inner_product_identity_check(basis, f, g, cfg):
    """Compare the pairing ``∫ f ḡ e^(-2φ) dm`` with the derivative form
    ``f(0) conj(g(0)) + ∫ f′ conj(g′) (1+φ′)^(-2) e^(-2φ) dm``.

    Both raw values are reported so that any normalisation offset between
    the two sides stays visible.

    Returns:
        IdentityCheck
    """
    profile = basis.profile
    df, dg = f.derivative(), g.derivative()

    def pairing(z):
        weight = np.exp(log_weight(profile, np.abs(z), 2.0))
        return f(z) * np.conj(g(z)) * weight

    def derivative_pairing(z):
        r = np.abs(z)
        log_w = (log_weight(profile, r, 2.0) -
                 2 * profile.log_one_plus_phi_prime(r))
        return df(z) * np.conj(dg(z)) * np.exp(log_w)

    left = plane_integral(pairing, cfg)
    right = plane_integral(derivative_pairing, cfg)

    lhs = complex(left.value)
    rhs = complex(f(0)) * complex(g(0)).conjugate() + complex(right.value)

    return IdentityCheck(lhs, rhs, _rel_err(lhs, rhs),
                         left.converged and right.converged)


def lemma28_equivalence_check(profile, f, p, cfg):
    """Return ``(|f(0)|^p + ∫ |f′|^p e^(-pφ) (1+φ′)^(-p) dm) / ‖f‖^p``.

    Raises:
        ConditionError: If the weight fails the admissibility checks.
    """
    flags = lemma28_admissible(profile, p)
    if not flags.admissible:
        raise ConditionError('Lemma 2.8 hypotheses fail for {}: {}'
                             .format(profile.label, flags._asdict()))

    df = f.derivative()

    def norm_integrand(z):
        return np.exp(p * f.log_abs(z) + log_weight(profile, np.abs(z), p))

    def derivative_integrand(z):
        r = np.abs(z)
        return np.exp(p * (df.log_abs(z) - profile.log_one_plus_phi_prime(r))
                      + log_weight(profile, r, p))

    norm = plane_integral(norm_integrand, cfg)
    tail = plane_integral(derivative_integrand, cfg)

    middle = abs(f(0)) ** p + float(tail.value)
    norm_power = float(norm.value)
    ratio = middle / norm_power if norm_power else math.inf

    return NormRatio(ratio, middle, norm_power,
                     norm.converged and tail.converged)


def _rel_err(value, reference):
    scale = abs(reference)
    if scale == 0:
        return abs(value - reference)
    return abs(value - reference) / scale

"""The ode module.

Linear differential equations with entire coefficients

    f^(k) + A_(k-1) f^(k-1) + ... + A_1 f′ + A_0 f = A_k

solved globally by power series and numerically along rays, together with
the growth envelope of their solutions and numerical space membership.
"""

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import logging
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from .base import DIVERGING, IN_SPACE, SolverError, Verdict
from . import entire
from .quadrature import tail_dominance, weighted_norm


logger = logging.getLogger(__name__)

#: Points of the refinement grid used by :func:`growth_envelope`.
ENVELOPE_GRID = 4096

#: Safety factor of the envelope calibration.
ENVELOPE_SAFETY = 2.0


class LDEProblem(namedtuple('LDEProblem', [
        'k', 'coefficients', 'forcing', 'initial'])):
    """A linear differential equation with initial data at the origin.

    Attributes:
        k (int): Order, at least 1.
        coefficients (tuple): ``A_0..A_(k-1)`` as
            :class:`.EntireFunction`.
        forcing (EntireFunction): ``A_k``, possibly the zero function.
        initial (tuple): ``f(0), f′(0), ..., f^(k-1)(0)``.
    """
    __slots__ = ()

    def __new__(cls, k, coefficients, forcing=None, initial=None):
        if forcing is None:
            forcing = entire.zero()
        if initial is None:
            initial = (1,) + (0,) * (k - 1)

        if k < 1:
            raise SolverError('order must be at least 1 but found {!r}'
                              .format(k))
        if len(coefficients) != k:
            raise SolverError('need {} coefficients but found {}'
                              .format(k, len(coefficients)))
        if len(initial) != k:
            raise SolverError('need {} initial values but found {}'
                              .format(k, len(initial)))

        return super().__new__(cls, k, tuple(coefficients), forcing,
                               tuple(complex(v) for v in initial))

    @property
    def k_c(self):
        """Number of coefficients ``A_j`` (``j < k``) not identically zero."""
        return sum(1 for a in self.coefficients if not a.is_zero())

    @property
    def delta(self):
        """``0`` for a homogeneous equation and ``1`` otherwise."""
        return 0 if self.forcing.is_zero() else 1

    @property
    def homogeneous(self):
        return self.delta == 0

    def with_initial(self, initial):
        return self.__class__(self.k, self.coefficients, self.forcing,
                              initial)

    def basis_initial_data(self):
        """Return the unit initial vectors ``e_0..e_(k-1)``."""
        return [tuple(1 if i == j else 0 for i in range(self.k))
                for j in range(self.k)]

    def to_dict(self):
        return {'order': self.k,
                'coefficients': [a.to_dict() for a in self.coefficients],
                'forcing': self.forcing.to_dict(),
                'initial': [[v.real, v.imag] for v in self.initial]}

    @classmethod
    def from_dict(cls, data):
        return cls(data['order'],
                   [entire.from_dict(a) for a in data['coefficients']],
                   entire.from_dict(data['forcing'])
                   if data.get('forcing') else None,
                   data.get('initial'))


class RayTrace(namedtuple('RayTrace', [
        'theta', 'radii', 'values', 'envelope', 'weighted', 'blowup',
        'message'])):
    """Samples of a solution and its derivatives along the ray
    ``{r e^(iθ)}``.

    Attributes:
        theta (float): Angle.
        radii (ndarray): Strictly increasing radii.
        values (ndarray): Shape ``(len(radii), k)``: ``f, f′, ...``.
        envelope (ndarray|None): Growth envelope at each radius.
        weighted (ndarray|None): ``|f(re^(iθ))| e^(-φ(r))`` samples.
        blowup (bool): Whether the integration stopped early.
        message (str): Solver status message.
    """
    @property
    def f(self):
        return self.values[:, 0]

    def last(self):
        return complex(self.values[-1, 0])


class Envelope(namedtuple('Envelope', [
        'radii', 'values', 'C', 'C_value', 'R_0', 'delta', 'k_c',
        'shifted'])):
    """The calibrated growth envelope along a ray.

    Attributes:
        radii (ndarray): Radii where the envelope is evaluated.
        values (ndarray): Envelope values.
        C (float): Calibrated constant.
        C_value (float): Constant that makes ``B(R_0)`` equal to
            ``2 |f(R_0 e^(iθ))|``, reported next to ``C``.
        R_0 (float): Calibration radius actually used.
        delta (int): ``0`` for homogeneous equations, else ``1``.
        k_c (int): Count of nonzero coefficients.
        shifted (bool): Whether ``R_0`` was moved outward.
    """
    pass


def taylor_solve(problem, N):
    """Return the degree-`N` Taylor polynomial of the solution as a
    :class:`.PowerSeries`.

    Coefficients beyond the initial data follow from matching coefficient
    ``n`` of the equation:

        a_(n+k) (n+k)!/n! = [A_k − Σ_j A_j f^(j)]_n

    computed in ascending ``n``.

    Raises:
        SolverError: If ``N < k`` or a coefficient overflows.
    """
    k = problem.k
    if N < k:
        raise SolverError('truncation N={} is below the order k={}'
                          .format(N, k))

    a = np.zeros(N + 1, dtype=complex)
    for j, value in enumerate(problem.initial):
        a[j] = value / math.factorial(j)

    coeffs = [A.taylor(N) for A in problem.coefficients]
    active = [j for j, A in enumerate(problem.coefficients) if not A.is_zero()]
    forcing = problem.forcing.taylor(N)

    # d[j][m] = coefficient m of f^(j) = a_(m+j) (m+1)...(m+j)
    d = [np.zeros(N + 1, dtype=complex) for _ in range(k)]

    def fill(j, m):
        d[j][m] = a[m + j] * float(math.prod(range(m + 1, m + j + 1)))

    for j in range(k):
        for m in range(k - j):
            fill(j, m)

    for n in range(N - k + 1):
        total = forcing[n]
        for j in active:
            total = total - np.sum(coeffs[j][:n + 1] * d[j][n::-1])

        value = total / float(math.prod(range(n + 1, n + k + 1)))
        if not np.isfinite(value):
            raise SolverError('series coefficient overflow at index {}'
                              .format(n + k))
        a[n + k] = value

        for j in range(k):
            m = n + k - j
            if m <= N:
                fill(j, m)

    logger.info('solved order-%d equation by series to degree %d', k, N)

    return entire.PowerSeries(a)


def residual(problem, f, N):
    """Return the coefficients ``0..N-k`` of
    ``f^(k) + Σ A_j f^(j) − A_k``.
    """
    k = problem.k
    size = N - k
    total = f.derivative(k).taylor(size) - problem.forcing.taylor(size)
    for j, A in enumerate(problem.coefficients):
        total = total + entire.series_multiply(A, f.derivative(j),
                                               size).taylor(size)
    return total


def ray_integrate(problem, theta, r_max, tol=1e-10, radii=None, profile=None):
    """Integrate the equation along the ray ``t e^(iθ)``, ``0 <= t <= r_max``.

    The state ``w = (f, f′, ..., f^(k-1))`` solves
    ``w′(t) = e^(iθ) (M w + b)`` with the companion matrix ``M`` and the
    forcing in the last slot. The embedded Runge-Kutta pair of order 8(5,3)
    runs with relative and absolute tolerance `tol`.

    Args:
        problem (LDEProblem): The equation and its initial data.
        theta (float): Ray angle.
        r_max (float): End radius, positive.
        tol (float, optional): Local error tolerance.
        radii (array, optional): Output radii in ``[0, r_max]``. Defaults to
            201 equispaced radii.
        profile (WeightProfile, optional): When given, the trace carries
            ``|f| e^(-φ)`` samples.

    Returns:
        RayTrace
    """
    if not r_max > 0:
        raise SolverError('r_max must be positive but found {!r}'
                          .format(r_max))

    if radii is None:
        radii = np.linspace(0.0, r_max, 201)
    radii = np.asarray(radii, dtype=float)

    k = problem.k
    rotor = complex(math.cos(theta), math.sin(theta))
    coefficients = problem.coefficients
    forcing = problem.forcing

    def rhs(t, w):
        z = t * rotor
        out = np.empty(k, dtype=complex)
        out[:-1] = w[1:]
        top = forcing.evaluate(z)
        for j, A in enumerate(coefficients):
            top -= A.evaluate(z) * w[j]
        out[-1] = top
        return rotor * out

    solution = solve_ivp(rhs, (0.0, float(r_max)),
                         np.array(problem.initial, dtype=complex),
                         method='DOP853', t_eval=radii, rtol=tol, atol=tol)

    values = solution.y.T
    finite = np.all(np.isfinite(values), axis=1)
    blowup = solution.status != 0 or not bool(np.all(finite))
    if not np.all(finite):
        stop = int(np.argmin(finite))
        values = values[:stop]
    out_radii = solution.t[:len(values)]

    if blowup:
        last = float(out_radii[-1]) if len(out_radii) else 0.0
        logger.warning('ray θ=%s stopped at r=%s: %s', theta, last,
                       solution.message)

    weighted = None
    if profile is not None:
        with np.errstate(over='ignore'):
            weighted = np.abs(values[:, 0]) * np.exp(-profile.phi(out_radii))

    return RayTrace(float(theta), out_radii, values, None, weighted, blowup,
                    solution.message)


def ray_fan(problem, thetas, r_max, tol=1e-10, radii=None, workers=None):
    """Integrate along several rays concurrently; traces keep the order of
    `thetas`.
    """
    def trace(theta):
        return ray_integrate(problem, theta, r_max, tol, radii)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(trace, thetas))


def growth_envelope(problem, theta, radii, R_0=1.0, tol=1e-12):
    """Evaluate the calibrated growth envelope

    ``B(r) = C (max_(0≤x≤r) |A_k(x e^(iθ))| + 1)
    exp ∫_0^r (δ + k_c max_j |A_j(s e^(iθ))|^(1/(k-j))) ds``

    on `radii`. The exponent is a trapezoid integral on a refinement of
    ``[0, max(radii)]`` and the running max uses the same grid.

    ``C`` makes ``B(R_0)`` equal twice the scaled state norm
    ``Σ_j |f^(j)(R_0 e^(iθ))| ρ^(-j)`` with
    ``ρ = max(δ, k_c max_j |A_j(R_0 e^(iθ))|^(1/(k-j)))`` (``1`` when zero),
    so the constant depends on the derivatives of ``f`` and on the
    coefficients at ``R_0``. When the coefficients all vanish at ``R_0`` or
    the state is zero there, ``R_0`` moves outward to the next radius.
    ``C_value`` is the constant calibrated from ``2 |f(R_0 e^(iθ))|`` alone.

    Returns:
        Envelope
    """
    radii = np.asarray(radii, dtype=float)
    k, k_c, delta = problem.k, problem.k_c, problem.delta
    rotor = complex(math.cos(theta), math.sin(theta))
    candidates = [R_0] + [float(r) for r in radii if r > R_0]

    r_end = float(max(np.max(radii), R_0))
    grid = np.union1d(np.linspace(0.0, r_end, ENVELOPE_GRID),
                      np.append(radii, candidates))
    points = grid * rotor

    forcing_max = np.maximum.accumulate(np.abs(problem.forcing(points)))
    rate = np.zeros(len(grid))
    for j, A in enumerate(problem.coefficients):
        if not A.is_zero():
            rate = np.maximum(rate, np.abs(A(points)) ** (1.0 / (k - j)))
    exponent = cumulative_trapezoid(delta + k_c * rate, grid, initial=0.0)
    log_shape = np.log1p(forcing_max) + exponent

    shifted = False
    for R in candidates:
        index = int(np.searchsorted(grid, R))
        rho = max(delta, k_c * rate[index]) or 1.0
        if k_c and rate[index] == 0:
            shifted = True
            continue

        state = ray_integrate(problem, theta, R, tol,
                              radii=[0.0, R]).values[-1]
        scale = float(sum(abs(state[j]) * rho ** -j for j in range(k)))
        if scale > 0:
            break
        shifted = True
    else:
        raise SolverError('no calibration radius on ray θ={}'.format(theta))

    if shifted:
        logger.warning('envelope calibration radius moved from %s to %s',
                       R_0, R)

    log_C = math.log(ENVELOPE_SAFETY * scale) - log_shape[index]
    positions = np.searchsorted(grid, radii)
    with np.errstate(over='ignore'):
        values = np.exp(log_C + log_shape[positions])

    C_value = 2 * abs(state[0]) * math.exp(-log_shape[index])
    return Envelope(radii, values, math.exp(log_C), C_value, R, delta, k_c,
                    shifted)


def membership_probe(f, space, cfg):
    """Decide numerically whether `f` lies in `space`.

    The verdict is ``in_space`` when the norm quadrature converges. For
    finite ``p`` the fraction of the integral mass beyond the peak radius is
    reported; a diverging verdict carries the radius where the integrand
    stopped decaying.

    Returns:
        Verdict
    """
    norm = weighted_norm(f, space, cfg)

    if not norm.converged:
        diagnostics = {'diverging_radius': norm.diagnostics.get('r_end'),
                       'reason': norm.diagnostics.get('reason'),
                       'last_ratio': norm.diagnostics.get('last_ratio')}
        logger.warning('probe diverging at r=%s (%s)',
                       diagnostics['diverging_radius'], diagnostics['reason'])
        return Verdict(DIVERGING, norm, diagnostics)

    diagnostics = {'peak_radius': norm.peak_radius, 'mass_beyond_peak': None}

    if not space.is_sup and not space.m:
        if norm.value == 0:
            diagnostics['mass_beyond_peak'] = 0.0
        else:
            split = tail_dominance(f, space, cfg, R=norm.peak_radius)
            diagnostics['mass_beyond_peak'] = (split.tail / split.full
                                               if split.full else 0.0)

    return Verdict(IN_SPACE, norm, diagnostics)

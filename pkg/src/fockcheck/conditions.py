"""The conditions module.

Checkers that evaluate the hypotheses of the membership theorems for
solutions of linear differential equations and cross-check them against
numerical membership probes of the conclusions.

Every checker returns a :class:`ConditionReport`. A report is
``consistent`` unless its hypotheses hold while some conclusion probe is not
``in_space``. Sups over ℂ are taken on declared grids; finiteness of sups of
polynomial quantities is decided by degree comparison.
"""

from collections import namedtuple
import logging
import math

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .base import (
    ConditionError,
    ConfigError,
    EvaluatorABC,
    SeriesTruncationError,
    SolverError,
    UNRESOLVED,
    Verdict,
    grid_hash,
)
from . import entire
from .ode import LDEProblem, membership_probe, taylor_solve
from .quadrature import (
    SpaceSpec,
    gauss_legendre,
    log_weight,
    plane_integral,
    segment_integral,
    weighted_norm,
)
from .weights import (
    classical_gaussian,
    classify_weight,
    lemma28_admissible,
    scaled_exponential,
)


logger = logging.getLogger(__name__)

THEOREMS = ('T1_1', 'T1_2', 'T1_3', 'T1_4', 'T1_5', 'T1_6', 'T1_7', 'T1_8')
KERNEL_THEOREMS = ('T1_6', 'T1_7', 'T1_8')

NOT_APPLICABLE = 'not_applicable'

#: Default series degree of solutions probed for membership.
SOLVE_ORDER = 160

#: Radii of the sup grid used by :func:`sup_ratio`.
SUP_RADII = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 241)))

#: Radii of the doubling test for transcendental coefficients.
DOUBLING_RADII = (4.0, 8.0, 16.0, 32.0)

#: Margin of the ``|f| < e^(e^r)`` growth check.
GROWTH_MARGIN = 1 - 1e-9

#: Points per radial row processed at once by nested segment integrals.
SEGMENT_CHUNK = 512

RELATIVE_NOTE = 'verdicts are relative to the configured constants'


class ConstantsConfig(namedtuple('ConstantsConfig', [
        'C', 'D', 'Ci', 'E', 'F', 'G'])):
    """The unspecified constants of the hypotheses of Theorems 1.1 and 1.2.

    Sequences shorter than needed are padded with ``1.0``.

    Attributes:
        C (float): Leading constant of Theorem 1.1.
        D (tuple): ``D_i``, ``i <= k-1``.
        Ci (tuple): ``C_i``, ``i <= k``.
        E (tuple): ``E_j``, ``j <= k-1``.
        F (tuple): ``F_i``.
        G (float): Primitive term constant.
    """
    __slots__ = ()

    def __new__(cls, C=1.0, D=(), Ci=(), E=(), F=(), G=1.0):
        self = super().__new__(cls, float(C), tuple(map(float, D)),
                               tuple(map(float, Ci)), tuple(map(float, E)),
                               tuple(map(float, F)), float(G))
        for name in self._fields:
            value = getattr(self, name)
            values = value if isinstance(value, tuple) else (value,)
            if not all(v > 0 for v in values):
                raise ConfigError('constants must be strictly positive',
                                  field=name)
        return self

    @staticmethod
    def _pick(values, index):
        return values[index] if index < len(values) else 1.0

    def d(self, i):
        return self._pick(self.D, i)

    def c(self, i):
        return self._pick(self.Ci, i)

    def e(self, j):
        return self._pick(self.E, j)

    def to_dict(self):
        return {name: (list(value) if isinstance(value, tuple) else value)
                for name, value in self._asdict().items()}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


class ConditionReport(namedtuple('ConditionReport', [
        'theorem',
        'hypothesis_values',
        'hypothesis_satisfied',
        'conclusion_probe',
        'consistent',
        'notes'])):
    """The outcome of a theorem checker.

    Attributes:
        theorem (str): One of :data:`THEOREMS`.
        hypothesis_values (dict): Computed hypothesis quantities.
        hypothesis_satisfied (bool|str): The verdict, or
            ``'not_applicable'``.
        conclusion_probe (list): ``(label, Verdict)`` pairs.
        consistent (bool): ``False`` only when the hypotheses hold and some
            probe is not in the space.
        notes (list): Free text notes.
    """
    def to_dict(self):
        return {'theorem': self.theorem,
                'hypothesis_values': self.hypothesis_values,
                'hypothesis_satisfied': self.hypothesis_satisfied,
                'conclusion_probe': [{'label': label,
                                      'verdict': verdict.to_dict()}
                                     for label, verdict in
                                     self.conclusion_probe],
                'consistent': self.consistent,
                'notes': list(self.notes)}


class SupRatio(namedtuple('SupRatio', [
        'value', 'attained_at', 'degree_flag', 'growth_flag'])):
    """``sup_z |A(z)| / (1+|z|)^s``.

    Attributes:
        value (float): The sup, ``math.inf`` when infinite.
        attained_at (float|str): Radius or ``'infinity'``.
        degree_flag (bool): Infinite by degree comparison.
        growth_flag (bool): Infinite by super-polynomial growth.
    """
    def to_dict(self):
        return dict(self._asdict())


class ProbeGrid(namedtuple('ProbeGrid', ['radii', 'n_angles', 'extension'])):
    """Polar grid of the outer sups of the kernel functionals.

    Attributes:
        radii (tuple): Probe radii.
        n_angles (int): Equispaced angles per radius.
        extension (tuple): Multiples of the last radius where decay of the
            objective is checked.
    """
    __slots__ = ()

    def __new__(cls, radii=None, n_angles=16, extension=(1.5, 2.0)):
        if radii is None:
            radii = np.geomspace(0.25, 4.0, 12)
        return super().__new__(cls, tuple(float(r) for r in radii),
                               int(n_angles), tuple(extension))

    def _ring(self, radii):
        theta = 2 * np.pi * np.arange(self.n_angles) / self.n_angles
        return (np.asarray(radii)[:, None] *
                np.exp(1j * theta)[None, :]).ravel()

    def points(self):
        return self._ring(self.radii)

    def extension_points(self):
        return self._ring([self.radii[-1] * m for m in self.extension])

    def grid_hash(self):
        return grid_hash(self.points(), self.extension_points())


class FunctionalValue(namedtuple('FunctionalValue', [
        'value', 'attained_at', 'side_condition', 'decays', 'grid_hash',
        'converged'])):
    """A kernel functional evaluated on a probe grid.

    Attributes:
        value (float): Grid sup of the objective.
        attained_at (complex): Grid point of the sup.
        side_condition (dict): Boundedness check of the primitive of ``A``.
        decays (bool): Objective at the extension radii stays below the sup.
        grid_hash (str): Digest of the probe grid.
        converged (bool): Whether the inner plane integrals converged.
    """
    def to_dict(self):
        return {'value': self.value,
                'attained_at': [self.attained_at.real, self.attained_at.imag],
                'side_condition': self.side_condition,
                'decays': self.decays,
                'grid_hash': self.grid_hash,
                'converged': self.converged}


class _Pointwise(EvaluatorABC):
    """A function known only through pointwise values, such as a quotient
    of entire functions.
    """
    type_name = 'pointwise'

    def __init__(self, values, log_abs):
        self._values = values
        self._log_abs = log_abs

    def __call__(self, z):
        return self._values(np.asarray(z, dtype=complex))

    def log_abs(self, z):
        return self._log_abs(np.asarray(z, dtype=complex))

    def to_dict(self):
        return {'type': self.type_name}


def sup_ratio(A, s, radii=SUP_RADII, n_theta=256):
    """Return ``sup_z |A(z)| / (1+|z|)^s``.

    For a polynomial of degree ``d`` the sup is infinite iff ``d > s``.
    Otherwise the max over `radii` is refined by a bounded scalar search
    and compared with the limit ``|lead(A)|`` when ``d == s``. A
    transcendental `A` whose ``log M(r) − s log(1+r)`` keeps growing by
    doubling steps is reported infinite with the growth flag.

    Returns:
        SupRatio
    """
    degree = A.degree()

    if degree == -1:
        return SupRatio(0.0, 0.0, False, False)

    if degree is not None and degree > s:
        return SupRatio(math.inf, 'infinity', True, False)

    def log_ratio(r):
        return entire.log_max_modulus(A, r, n_theta) - s * math.log1p(r)

    if degree is None:
        try:
            doubling = [log_ratio(r) for r in DOUBLING_RADII]
        except SeriesTruncationError:
            return SupRatio(math.inf, 'infinity', False, True)
        steps = np.diff(doubling)
        if np.all(steps > math.log(2)):
            return SupRatio(math.inf, 'infinity', False, True)

    try:
        values = np.array([log_ratio(r) for r in radii])
    except SeriesTruncationError:
        return SupRatio(math.inf, 'infinity', False, True)

    best = int(np.argmax(values))
    log_best, where = float(values[best]), float(radii[best])

    lo = radii[max(best - 1, 0)]
    hi = radii[min(best + 1, len(radii) - 1)]
    if hi > lo:
        found = minimize_scalar(lambda r: -log_ratio(r), bounds=(lo, hi),
                                method='bounded', options={'xatol': 1e-10})
        if -found.fun > log_best:
            log_best, where = -float(found.fun), float(found.x)

    value = math.exp(log_best)

    if degree is not None and degree == s:
        lead = abs(A.taylor(degree)[degree])
        if lead >= value:
            return SupRatio(float(lead), 'infinity', False, False)

    return SupRatio(value, where, False, False)


def degeneracy(problem):
    """Classify the coefficients against the degenerate form
    ``A_1 ≡ ... ≡ A_(k-1) ≡ 0`` and ``A_0`` constant.
    """
    middle_zero = all(A.is_zero() for A in problem.coefficients[1:])
    constant = problem.coefficients[0].is_constant()
    return {'middle_coefficients_zero': middle_zero,
            'A_0_constant': constant,
            'compliant': middle_zero and constant}


def probe(f, space, cfg):
    """Run :func:`.membership_probe`, reporting an ``unresolved`` verdict when
    a series cannot be evaluated on the quadrature grid.
    """
    try:
        return membership_probe(f, space, cfg)
    except SeriesTruncationError as exc:
        logger.warning('probe unresolved: %s', exc)
        return Verdict(UNRESOLVED, None, {'reason': str(exc)})


def _solution_probes(problem, space, cfg, N, derivative=0):
    probes = []
    for data in problem.basis_initial_data():
        label = 'solution{}'.format(list(data))
        try:
            f = taylor_solve(problem.with_initial(data), N)
        except SolverError as exc:
            logger.warning('probe unresolved: %s', exc)
            probes.append((label, Verdict(UNRESOLVED, None,
                                          {'reason': str(exc)})))
            continue
        if derivative:
            f = f.derivative(derivative)
        probes.append((label, probe(f, space, cfg)))
    return probes


def _report(theorem, values, satisfied, probes, notes):
    holds = satisfied is True
    consistent = (not holds) or all(v.in_space for _, v in probes)
    if not consistent:
        logger.error('%s: hypotheses hold but a probe is not in the space',
                     theorem)
    logger.info('%s: hypothesis=%s consistent=%s', theorem, satisfied,
                consistent)
    return ConditionReport(theorem, values, satisfied, probes, consistent,
                           notes)


def thm11_sum(problem, constants):
    """Return ``S = C Σ_i D_i sup |A_i|/(1+|z|)^(k-i)`` and the sups."""
    k = problem.k
    sups = [sup_ratio(A, k - i) for i, A in enumerate(problem.coefficients)]
    S = constants.C * sum(constants.d(i) * s.value
                          for i, s in enumerate(sups))
    return S, sups


def thm12_sum(problem, constants):
    """Return ``S = Σ_i C_i Σ_j E_j sup |A_j|/(1+|z|)^(k-i-j)`` and the sups
    keyed by ``"i,j"``.
    """
    k = problem.k
    S = 0.0
    sups = {}
    for i in range(k + 1):
        inner = 0.0
        for j, A in enumerate(problem.coefficients):
            ratio = sup_ratio(A, k - i - j)
            sups['{},{}'.format(i, j)] = ratio.to_dict()
            inner += ratio.value * constants.e(j)
        S += constants.c(i) * inner
    return S, sups


def check_thm11(problem, p, constants, cfg, N=SOLVE_ORDER):
    """Check ``C Σ D_i sup |A_i|/(1+|z|)^(k-i) < 1`` together with
    membership of the k-th primitive of ``A_k`` in ``F^p``, and probe the
    solutions in ``F^p``.
    """
    k = problem.k
    S, sups = thm11_sum(problem, constants)

    space = SpaceSpec(classical_gaussian(), p)
    primitive = problem.forcing.antiderivative(k)
    primitive_probe = probe(primitive, space, cfg)

    satisfied = bool(S < 1 and primitive_probe.in_space)
    values = {'S': S,
              'sups': [s.to_dict() for s in sups],
              'primitive_probe': primitive_probe.to_dict()}
    notes = [RELATIVE_NOTE,
             'a finite sum forces polynomial coefficients with '
             'deg A_i <= k - i']

    probes = _solution_probes(problem, space, cfg, N)
    return _report('T1_1', values, satisfied, probes, notes)


def check_thm12(problem, p, constants, cfg, N=SOLVE_ORDER):
    """Check ``Σ_i C_i Σ_j sup |A_j|/(1+|z|)^(k-i-j) E_j < 1`` together with
    membership of the k-th primitive of ``A_k`` in ``F^{p,k}``, and probe
    the solutions in ``F^{p,k}``.
    """
    k = problem.k
    S, sups = thm12_sum(problem, constants)

    space = SpaceSpec(classical_gaussian(), p, m=k)
    primitive = problem.forcing.antiderivative(k)
    primitive_probe = probe(primitive, space, cfg)

    satisfied = bool(S < 1 and primitive_probe.in_space)
    values = {'S': S,
              'sups': sups,
              'primitive_probe': primitive_probe.to_dict(),
              'degeneracy': degeneracy(problem)}
    notes = [RELATIVE_NOTE,
             'a finite sum forces A_1..A_(k-1) = 0 and A_0 constant']

    probes = _solution_probes(problem, space, cfg, N)
    return _report('T1_2', values, satisfied, probes, notes)


def check_thm13(problem, profile, p, q, cfg, r_max=50.0, n_radii=64,
                N=SOLVE_ORDER):
    """Check ``max|A_j(re^(iθ))| <= φ(r)^(1/2)/r`` beyond some ``r_0`` with
    the nonconstancy hypotheses, and probe the solutions in
    ``F^{p,q}_φ``.
    """
    radii = np.geomspace(0.1, r_max, n_radii)
    bound = 0.5 * profile.log_phi(radii) - np.log(radii)

    holds = np.ones(n_radii, dtype=bool)
    witness = None
    for j, A in enumerate(problem.coefficients):
        logs = np.array([entire.log_max_modulus(A, r) for r in radii])
        ok = logs <= bound
        holds &= ok
        if not ok[-1] and witness is None:
            witness = {'j': j, 'r': float(radii[-1])}

    r_0 = None
    if holds[-1]:
        failing = np.flatnonzero(~holds)
        r_0 = float(radii[failing[-1] + 1] if len(failing) else radii[0])

    forcing_nonconstant = not problem.forcing.is_constant()
    some_nonconstant = any(not A.is_constant() for A in problem.coefficients)
    diagnostics = classify_weight(profile)

    satisfied = bool(r_0 is not None and forcing_nonconstant and
                     some_nonconstant and diagnostics.class_I)
    values = {'r_0': r_0,
              'witness': witness,
              'forcing_nonconstant': forcing_nonconstant,
              'some_coefficient_nonconstant': some_nonconstant,
              'class_I': diagnostics.class_I,
              'r_max': r_max}
    notes = ['bound checked through the maximum modulus on a geometric '
             'grid up to r_max']

    space = SpaceSpec(profile, p, q)
    probes = _solution_probes(problem, space, cfg, N)
    return _report('T1_3', values, satisfied, probes, notes)


def check_thm14(problem, p, cfg, candidate=None, N=SOLVE_ORDER):
    """For constant ``A_0..A_(k-1)``, check that a solution lies in
    ``F^{p,k}`` and probe ``A_k = f^(k) + Σ A_j f^(j)`` in ``F^p``.
    """
    k = problem.k
    if not all(A.is_constant() for A in problem.coefficients):
        return _report('T1_4', {}, NOT_APPLICABLE, [],
                       ['coefficients A_0..A_(k-1) must be constants'])

    f = candidate if candidate is not None else taylor_solve(problem, N)
    norm = weighted_norm(f, SpaceSpec(classical_gaussian(), p, m=k), cfg)

    forcing = entire.Sum(
        [f.derivative(k)] +
        [entire.Product(A, f.derivative(j))
         for j, A in enumerate(problem.coefficients)])

    values = {'solution_norm': norm.to_dict()}
    probes = [('A_k', probe(forcing, SpaceSpec(classical_gaussian(), p),
                            cfg))]
    return _report('T1_4', values, bool(norm.converged), probes, [])


def check_thm15(problem, p, q, f, cfg, tail=(2.0, 4.0), derive_a0=False,
                probe_radii=None, n_probe_angles=64):
    """Check the hypotheses of the ``e^r`` weight theorem for the candidate
    solution `f` and probe ``A_0`` in ``F^{p,q}_(e^r)``.

    (a) ``log M(r, f) − e^r < log(1 − 1e-9)`` on the tail window;
    (b) ``A_j`` in ``F^p_(½e^r)`` for ``1 <= j <= k-1``;
    (c) ``A_k/f`` in ``F^{p,q}_(e^r)``, evaluated pointwise.

    With `derive_a0` the conclusion is probed on the pointwise quotient
    ``(A_k − f^(k) − Σ_(j≥1) A_j f^(j)) / f`` instead of the given ``A_0``.

    Raises:
        ConditionError: If `f` vanishes on the probe set.
    """
    k = problem.k
    weight = scaled_exponential(1.0)
    half = scaled_exponential(0.5)

    if probe_radii is None:
        probe_radii = np.linspace(0.0, 8.0, 65)
    theta = 2 * np.pi * np.arange(n_probe_angles) / n_probe_angles
    probe_set = (np.asarray(probe_radii)[:, None] *
                 np.exp(1j * theta)[None, :])
    with np.errstate(divide='ignore'):
        zeros = np.isneginf(f.log_abs(probe_set))
    if np.any(zeros):
        raise ConditionError('candidate has zeros on probe set; choose '
                             'different rays/annuli')

    radii = np.linspace(tail[0], tail[1], 16)
    excess = [entire.log_max_modulus(f, r) - math.exp(r) for r in radii]
    growth_ok = bool(max(excess) < math.log(GROWTH_MARGIN))

    coefficient_probes = [
        ('A_{}'.format(j), probe(A, SpaceSpec(half, p), cfg))
        for j, A in enumerate(problem.coefficients) if j >= 1]

    forcing = problem.forcing
    quotient = _Pointwise(lambda z: forcing(z) / f(z),
                          lambda z: forcing.log_abs(z) - f.log_abs(z))
    quotient_probe = probe(quotient, SpaceSpec(weight, p, q), cfg)

    satisfied = bool(growth_ok and quotient_probe.in_space and
                     all(v.in_space for _, v in coefficient_probes))

    if derive_a0:
        derivatives = [f.derivative(j) for j in range(k + 1)]

        def a0_values(z):
            rest = forcing(z) - derivatives[k](z)
            for j, A in enumerate(problem.coefficients):
                if j >= 1:
                    rest = rest - A(z) * derivatives[j](z)
            return rest / f(z)

        target = _Pointwise(a0_values,
                            lambda z: np.log(np.abs(a0_values(z))))
    else:
        target = problem.coefficients[0]

    values = {'growth_excess_max': float(max(excess)),
              'growth_ok': growth_ok,
              'coefficient_probes': {label: v.to_dict()
                                     for label, v in coefficient_probes},
              'quotient_probe': quotient_probe.to_dict()}
    notes = ['rays are checked on finitely many angles; an exceptional '
             'set of angles of measure zero is not computed']

    probes = [('A_0', probe(target, SpaceSpec(weight, p, q), cfg))]
    return _report('T1_5', values, satisfied, probes, notes)


def segment_moments(A, z, N, nodes):
    """Return ``M_n(z) = ∫_0^z ζ^n A(ζ) dζ`` for ``n = 0..N``, shape
    ``(N+1,) + z.shape``.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.zeros((N + 1, flat.size), dtype=complex)

    for start in range(0, flat.size, SEGMENT_CHUNK):
        chunk = flat[start:start + SEGMENT_CHUNK]

        def integrand(points):
            values = A(points)
            stack = np.empty((points.shape[0], N + 1) + points.shape[1:],
                             dtype=complex)
            power = np.ones_like(points)
            for n in range(N + 1):
                if n:
                    power = power * points
                stack[:, n] = power * values
            return stack

        out[:, start:start + SEGMENT_CHUNK] = segment_integral(
            integrand, chunk, nodes)

    return out.reshape((N + 1,) + z.shape)


class KernelFunctional(object):
    """One of the kernel functionals ``X_K``, ``Y_K`` or ``Z_K`` on a
    fixed basis, quadrature configuration and probe grid.

    The inner contour integral is linear in the kernel series, so
    ``X_K`` and ``Y_K`` factor through the segment moments
    ``M_n(z) = ∫_0^z ζ^n A dζ`` and the planar moments
    ``Q_n = ∫ η̄^(n-1) w(|η|) dm(η)``, which do not depend on ``A`` and are
    computed once. ``Z_K`` needs the planar moments
    ``P_n = ∫ M_n(z) w(|z|) dm(z)`` for each ``A``.

    Args:
        kind (str): ``'X'``, ``'Y'`` or ``'Z'``.
        basis (KernelBasis): Kernel basis of the weight.
        cfg (QuadratureConfig): Grid of the planar integrals.
        grid (ProbeGrid, optional): Outer sup grid.
    """
    def __init__(self, kind, basis, cfg, grid=None):
        if kind not in ('X', 'Y', 'Z'):
            raise ValueError('unknown functional {!r}'.format(kind))

        self.kind = kind
        self.basis = basis
        self.profile = basis.profile
        self.cfg = cfg
        self.grid = grid or ProbeGrid()
        self._planar = None

        if kind == 'Y':
            self.weight_dominates_gaussian = _dominates_gaussian(self.profile)
        if kind == 'Z':
            flags = lemma28_admissible(self.profile, 2)
            if not flags.admissible:
                raise ConditionError('Lemma 2.8 hypotheses fail for {}'
                                     .format(self.profile.label))

    def _log_inner_weight(self, r):
        profile = self.profile
        log_w = -2 * profile.log_one_plus_phi_prime(r)
        if self.kind == 'X':
            return log_w + log_weight(profile, r, 1.0)
        if self.kind == 'Y':
            return log_w + log_weight(profile, r, 2.0) + r * r / 2
        return log_w + log_weight(profile, r, 2.0)

    def _log_outer_factor(self, r):
        if self.kind == 'X':
            return log_weight(self.profile, r, 1.0)
        if self.kind == 'Y':
            return -r * r / 2
        return np.zeros_like(r)

    def planar_moments(self):
        """Return ``Q_n`` for ``n = 1..N`` (index ``n - 1``)."""
        if self._planar is None:
            N = self.basis.N

            def integrand(eta):
                weight = np.exp(self._log_inner_weight(np.abs(eta)))
                conj_eta = np.conj(eta)
                stack = np.empty((N,) + eta.shape, dtype=complex)
                power = np.ones_like(eta)
                for n in range(1, N + 1):
                    if n > 1:
                        power = power * conj_eta
                    stack[n - 1] = power * weight
                return stack

            result = plane_integral(integrand, self.cfg)
            if not result.converged:
                raise ConditionError('outer integral non-convergent: {}'
                                     .format(result.diagnostics))
            self._planar = result.value

        return self._planar

    def side_condition(self, A):
        """Check boundedness of ``|∫_0^z A dζ|`` times the outer factor on the
        probe grid and its extension.
        """
        if self.kind == 'Z':
            return {'checked': False}

        primitive = A.antiderivative()
        inside = self.grid.points()
        outside = self.grid.extension_points()

        def objective(z):
            with np.errstate(divide='ignore'):
                return np.exp(primitive.log_abs(z) +
                              self._log_outer_factor(np.abs(z)))

        inner_max = float(np.max(objective(inside)))
        outer_max = float(np.max(objective(outside)))
        return {'checked': True,
                'grid_max': inner_max,
                'extension_max': outer_max,
                'bounded': bool(outer_max <= inner_max)}

    def objective(self, A, z):
        """Return the modulus of the functional's objective at the points
        `z`.
        """
        z = np.asarray(z, dtype=complex)
        basis, N = self.basis, self.basis.N
        inverse = basis.inverse_delta_sq

        if self.kind in ('X', 'Y'):
            moments = segment_moments(A, z, N, self.cfg.segment_nodes)
            planar = self.planar_moments()
            n = np.arange(1, N + 1)
            scale = (n * inverse[1:] * planar).reshape((N,) + (1,) * z.ndim)
            outer = np.sum(scale * moments[1:], axis=0)
            with np.errstate(over='ignore'):
                return np.abs(outer) * np.exp(
                    self._log_outer_factor(np.abs(z)))

        planar, _ = self._z_moments(A)
        conj_z = np.conj(z)
        total = np.zeros_like(z)
        power = np.ones_like(z)
        for n in range(N + 1):
            if n:
                power = power * conj_z
            total = total + power * inverse[n] * planar[n]
        return np.abs(total)

    def _z_moments(self, A):
        N, nodes = self.basis.N, self.cfg.segment_nodes

        def integrand(z):
            weight = np.exp(self._log_inner_weight(np.abs(z)))
            return segment_moments(A, z, N, nodes) * weight

        result = plane_integral(integrand, self.cfg)
        if not result.converged:
            raise ConditionError('outer integral non-convergent: {}'
                                 .format(result.diagnostics))
        return result.value, result

    def __call__(self, A):
        """Evaluate the functional for the coefficient `A`.

        Returns:
            FunctionalValue
        """
        side = self.side_condition(A)
        points = self.grid.points()

        if A.is_zero():
            return FunctionalValue(0.0, complex(points[0]), side, True,
                                   self.grid.grid_hash(), True)

        inside = self.objective(A, points)
        outside = self.objective(A, self.grid.extension_points())
        best = int(np.argmax(inside))
        value = float(inside[best])

        logger.info('%s_K = %.6g at z=%s under %s', self.kind, value,
                    points[best], self.profile.label)

        return FunctionalValue(value, complex(points[best]), side,
                               bool(np.max(outside) <= value),
                               self.grid.grid_hash(), True)


def nested_point_value(kind, basis, A, z, cfg):
    """Evaluate the X or Y objective at one point ``z`` by literal nested
    quadrature: a segment integral for every planar node.
    """
    functional = KernelFunctional(kind, basis, cfg)
    N, nodes = basis.N, cfg.segment_nodes
    t, w = gauss_legendre(nodes)
    zeta = t * complex(z)
    weights = w * complex(z) * A(zeta)
    inverse = basis.inverse_delta_sq

    def integrand(eta):
        conj_eta = np.conj(eta)[..., None]
        inner = np.zeros(eta.shape, dtype=complex)
        power = np.ones(eta.shape + (1,), dtype=complex)
        for n in range(1, N + 1):
            if n > 1:
                power = power * conj_eta
            inner = inner + n * inverse[n] * np.sum(
                power * zeta ** n * weights, axis=-1)
        return inner * np.exp(functional._log_inner_weight(np.abs(eta)))

    result = plane_integral(integrand, cfg)
    return abs(result.value) * float(
        np.exp(functional._log_outer_factor(np.array(abs(z)))))


def xk_functional(profile, A, basis, cfg, grid=None):
    """Return ``X_K(A)`` on the probe grid."""
    _same_profile(profile, basis)
    return KernelFunctional('X', basis, cfg, grid)(A)


def yk_functional(profile, A, basis, cfg, grid=None):
    """Return ``Y_K(A)`` on the probe grid."""
    _same_profile(profile, basis)
    return KernelFunctional('Y', basis, cfg, grid)(A)


def zk_functional(profile, A, basis, cfg, grid=None):
    """Return ``Z_K(A)`` on the probe grid."""
    _same_profile(profile, basis)
    return KernelFunctional('Z', basis, cfg, grid)(A)


def find_epsilon(functional, target=1.0, hi=1.0, rtol=1e-3):
    """Return an ε close to the largest one with ``functional(ε·1) <
    target``, by bisection on ε.

    Args:
        functional (KernelFunctional): The functional.
        target (float, optional): Threshold. Defaults to ``1``.
        hi (float, optional): Initial bracket end, doubled or halved
            until it brackets the threshold.
        rtol (float, optional): Relative bracket tolerance.
    """
    def excess(eps):
        return functional(entire.constant(eps)).value - target

    lo = hi
    if excess(hi) < 0:
        while excess(hi) < 0:
            lo, hi = hi, 2 * hi
            if hi > 1e12:
                raise ConditionError('functional stays below {} for every ε'
                                     .format(target))
    else:
        lo = hi / 2
        while excess(lo) >= 0:
            lo, hi = lo / 2, lo
            if lo < 1e-12:
                raise ConditionError('functional exceeds {} for every ε'
                                     .format(target))

    root = bisect(excess, lo, hi, xtol=rtol * lo)
    eps = root
    while excess(eps) >= 0:
        eps -= rtol * lo

    logger.info('ε = %.6g for %s_K < %s', eps, functional.kind, target)
    return eps


def check_kernel_theorem(theorem, profile, A, basis, cfg, grid=None,
                         N=SOLVE_ORDER):
    """Check one of the kernel-functional theorems for ``f″ + A f = 0`` and
    probe the two fundamental solutions.

    ``T1_6`` probes ``f′`` in ``F^∞_φ``, ``T1_7`` probes ``f′`` in
    ``F^∞`` and ``T1_8`` probes ``f`` in ``F²_φ``.
    """
    kind = {'T1_6': 'X', 'T1_7': 'Y', 'T1_8': 'Z'}.get(theorem)
    if kind is None:
        raise ConditionError('unknown kernel theorem {!r}'.format(theorem))
    _same_profile(profile, basis)

    functional = KernelFunctional(kind, basis, cfg, grid)
    value = functional(A)
    side_ok = value.side_condition.get('bounded', True)

    values = {'functional': value.to_dict(), 'kind': kind}
    notes = ['the checked equation is f″ + A f = 0']
    if kind == 'Y':
        values['weight_dominates_gaussian'] = \
            functional.weight_dominates_gaussian
        side_ok = side_ok and functional.weight_dominates_gaussian

    satisfied = bool(value.value < 1 and side_ok)
    if not satisfied:
        notes.append('no conclusion asserted')

    problem = LDEProblem(2, [A, entire.zero()])

    if theorem == 'T1_6':
        probes = _solution_probes(problem, SpaceSpec(profile, math.inf),
                                  cfg, N, derivative=1)
    elif theorem == 'T1_7':
        probes = _solution_probes(
            problem, SpaceSpec(classical_gaussian(), math.inf), cfg, N,
            derivative=1)
    else:
        probes = _solution_probes(problem, SpaceSpec(profile, 2), cfg, N)

    return _report(theorem, values, satisfied, probes, notes)


def _dominates_gaussian(profile):
    radii = np.array([10.0, 20.0, 40.0])
    with np.errstate(over='ignore'):
        gap = 2 * profile.phi(radii) - radii ** 2 / 2
    return bool(np.all(np.diff(gap) > 0) and gap[-1] > 0)


def _same_profile(profile, basis):
    if profile != basis.profile:
        raise ConditionError('basis built for {} but weight is {}'
                             .format(basis.profile.label, profile.label))


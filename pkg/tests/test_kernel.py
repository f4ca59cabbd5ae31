
import math

import numpy as np
import pytest
from scipy.special import gamma, gammaln

from fockcheck import entire
from fockcheck.base import ConditionError, SeriesTruncationError
from fockcheck.kernel import (
    compute_deltas,
    inner_product_identity_check,
    kernel_eval,
    kernel_series,
    kernel_slot_derivative,
    lemma28_equivalence_check,
    moment_peak,
    reproduce_check,
)
from fockcheck.quadrature import QuadratureConfig
from fockcheck.weights import classical_gaussian, power


parametrize = pytest.mark.parametrize

CFG = QuadratureConfig(n_radial=64, n_angular=128)


@pytest.fixture(scope='module')
def classical_basis():
    return compute_deltas(classical_gaussian(), 40, CFG)


@pytest.fixture(scope='module')
def cubic_basis():
    return compute_deltas(power(3), 25, CFG)


def test_classical_moments(classical_basis):
    n = np.arange(31)
    exact = math.log(math.pi) + gammaln(n + 1)

    assert np.allclose(classical_basis.log_delta_sq[:31], exact, rtol=0,
                       atol=1e-9)
    assert classical_basis.delta_sq[0] == pytest.approx(math.pi, rel=1e-9)
    assert classical_basis.delta_sq[2] == pytest.approx(2 * math.pi,
                                                        rel=1e-9)


def test_moments_are_log_convex(cubic_basis):
    steps = np.diff(cubic_basis.log_delta_sq)

    assert np.all(np.diff(steps) > 0)
    assert cubic_basis.tail_ratio == pytest.approx(
        math.exp(-steps[-1]), rel=1e-12)


@parametrize('case', [
    dict(profile=classical_gaussian(), n=0, expected=1 / math.sqrt(2)),
    dict(profile=classical_gaussian(), n=4, expected=math.sqrt(4.5)),
    dict(profile=power(3), n=1, expected=0.5 ** (1 / 3)),
])
def test_moment_peak(case):
    # (2n+1)/r = 2φ′(r)
    assert moment_peak(case['profile'], case['n']) == pytest.approx(
        case['expected'], rel=1e-12)


def test_compute_deltas_workers_match_serial():
    serial = compute_deltas(power(3), 10, CFG)
    threaded = compute_deltas(power(3), 10, CFG, workers=4)

    assert np.array_equal(serial.log_delta_sq, threaded.log_delta_sq)
    assert np.array_equal(serial.peaks, threaded.peaks)


def test_compute_deltas_rejects_negative_degree():
    with pytest.raises(ValueError, match='N must be non-negative'):
        compute_deltas(power(3), -1, CFG)


@parametrize('case', [
    dict(z=3 - 1j, zeta=0, expected=1 / math.pi),
    dict(z=0, zeta=0, expected=1 / math.pi),
    dict(z=1, zeta=1, expected=math.e / math.pi),
    dict(z=1j, zeta=1j, expected=math.e / math.pi),
    dict(z=1 + 1j, zeta=0.5, expected=np.exp((1 + 1j) * 0.5) / math.pi),
])
def test_kernel_eval(classical_basis, case):
    value = kernel_eval(classical_basis, case['z'], case['zeta'])

    assert value == pytest.approx(case['expected'], rel=1e-10)


def test_kernel_is_hermitian(classical_basis):
    rng = np.random.default_rng(7)
    points = rng.uniform(-1.4, 1.4, (50, 4))

    for x, y, u, v in points:
        z, zeta = complex(x, y), complex(u, v)
        left = kernel_eval(classical_basis, z, zeta)

        assert kernel_eval(classical_basis, zeta, z) == left.conjugate()

        diagonal = kernel_eval(classical_basis, z, z)

        assert diagonal.imag == 0
        assert diagonal.real > 0


def test_kernel_truncation_is_certified():
    basis = compute_deltas(classical_gaussian(), 5, CFG)

    with pytest.raises(SeriesTruncationError,
                       match='kernel truncation insufficient'):
        kernel_eval(basis, 3, 3)


def test_kernel_series(classical_basis):
    series = kernel_series(classical_basis, 0.5 - 1j)

    assert series(1 + 0.25j) == pytest.approx(
        kernel_eval(classical_basis, 1 + 0.25j, 0.5 - 1j), rel=1e-13)


def test_kernel_slot_derivative(classical_basis):
    at_origin = kernel_slot_derivative(classical_basis, 0)
    expected = np.zeros(41, dtype=complex)
    expected[1] = 1 / classical_basis.delta_sq[1]

    assert np.allclose(at_origin.coeffs, expected, rtol=1e-14, atol=0)

    at_one = kernel_slot_derivative(classical_basis, 1)

    assert at_one(1) == pytest.approx(math.e / math.pi, rel=1e-10)


@parametrize('case', [
    dict(f=entire.constant(1), zeta=0, tol=1e-10),
    dict(f=entire.monomial(2), zeta=1 + 1j, tol=1e-6),
    dict(f=entire.Polynomial([1, -2, 0, 1j]), zeta=-1.5j, tol=1e-6),
])
def test_reproduce_check_classical(classical_basis, case):
    check = reproduce_check(classical_basis, case['f'], case['zeta'], CFG)

    assert check.converged
    assert check.reference == pytest.approx(case['f'](case['zeta']))
    assert check.rel_err <= case['tol']


def test_reproduce_check_power_weight():
    basis = compute_deltas(power(3), 12, CFG)
    check = reproduce_check(basis, entire.monomial(1), 1, CFG)

    assert check.reproduced == pytest.approx(1, rel=1e-4)


def test_inner_product_identity_check(classical_basis):
    constant = inner_product_identity_check(
        classical_basis, entire.constant(1), entire.constant(1), CFG)

    assert constant.converged
    assert constant.lhs == pytest.approx(math.pi, rel=1e-10)
    assert constant.rhs == 1
    assert constant.ratio == pytest.approx(math.pi, rel=1e-10)

    orthogonal = inner_product_identity_check(
        classical_basis, entire.monomial(1), entire.constant(1), CFG)

    assert abs(orthogonal.lhs) < 1e-12
    assert abs(orthogonal.rhs) < 1e-12


@parametrize('case', [dict(a=a, b=b)
                      for a in range(5) for b in range(5) if a != b])
def test_pairing_monomials_orthogonal(cubic_basis, case):
    check = inner_product_identity_check(
        cubic_basis, entire.monomial(case['a']), entire.monomial(case['b']),
        CFG)

    assert abs(check.lhs) <= 1e-8
    assert abs(check.rhs) <= 1e-8


def test_pairing_monomials_diagonal(cubic_basis):
    ratios = []
    for a in range(5):
        check = inner_product_identity_check(
            cubic_basis, entire.monomial(a), entire.monomial(a), CFG)
        exponent = (2 * a + 2) / 3
        lhs = 2 * math.pi * gamma(exponent) / (3 * 2 ** exponent)

        assert check.converged
        assert check.lhs.real == pytest.approx(lhs, rel=1e-8)
        assert abs(check.ratio.imag) <= 1e-10
        ratios.append(check.ratio.real)

    assert all(0 < ratio < math.inf for ratio in ratios)
    assert max(ratios) / min(ratios) <= 10


def test_lemma28_equivalence_check():
    result = lemma28_equivalence_check(power(3), entire.constant(1), 2, CFG)
    norm_power = 2 * math.pi * gamma(2 / 3) / (3 * 2 ** (2 / 3))

    assert result.converged
    assert result.middle == 1
    assert result.norm_power == pytest.approx(norm_power, rel=1e-8)
    assert result.ratio == pytest.approx(1 / norm_power, rel=1e-8)

    cubic = lemma28_equivalence_check(power(3), entire.monomial(3), 2, CFG)

    assert 1e-3 <= cubic.ratio <= 1e3


def test_lemma28_equivalence_check_scale_invariance():
    one = lemma28_equivalence_check(power(3), entire.constant(1), 2, CFG)
    many = lemma28_equivalence_check(power(3), entire.constant(5), 2, CFG)

    assert many.ratio == pytest.approx(one.ratio, rel=1e-12)


def test_lemma28_equivalence_check_inadmissible_weight():
    with pytest.raises(ConditionError, match='Lemma 2.8 hypotheses fail'):
        lemma28_equivalence_check(power(0.5), entire.constant(1), 2, CFG)

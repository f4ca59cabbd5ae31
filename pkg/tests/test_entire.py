
import cmath
import math

import numpy as np
import pytest

from fockcheck import entire
from fockcheck.base import SeriesTruncationError
from fockcheck.entire import (
    NamedForm,
    Polynomial,
    PowerSeries,
    Product,
    Scaled,
    Sum,
    antiderivative,
    as_series,
    differentiate,
    evaluate,
    from_dict,
    growth_order_estimate,
    log_max_modulus,
    max_modulus,
    nevanlinna_proxy,
    series_exp,
    series_multiply,
)


parametrize = pytest.mark.parametrize

POINTS = np.array([0, 0.5, -1 + 1j, 2j, 1.5 - 0.5j])


@parametrize('case', [
    dict(f=Polynomial([1, 2, 3]), exact=lambda z: 1 + 2 * z + 3 * z ** 2),
    dict(f=entire.exp_scaled(2), exact=lambda z: np.exp(2 * z)),
    dict(f=entire.cos(), exact=np.cos),
    dict(f=entire.sin(), exact=np.sin),
    dict(f=entire.monomial(3), exact=lambda z: z ** 3),
    dict(f=entire.constant(1 - 2j), exact=lambda z: np.full_like(z, 1 - 2j)),
    dict(f=entire.exp_exp(), exact=lambda z: np.exp(np.exp(z))),
    dict(f=Sum([entire.cos(), entire.sin()]),
         exact=lambda z: np.cos(z) + np.sin(z)),
    dict(f=Product(entire.monomial(1), entire.exp_scaled(1)),
         exact=lambda z: z * np.exp(z)),
    dict(f=Scaled(1j, entire.cos()), exact=lambda z: 1j * np.cos(z)),
])
def test_evaluate(case):
    z = POINTS.astype(complex)

    assert np.allclose(evaluate(case['f'], z), case['exact'](z),
                       rtol=1e-13, atol=1e-13)


def test_evaluate_scalar():
    assert isinstance(evaluate(entire.cos(), 0), complex)
    assert evaluate(entire.exp_scaled(1), 1) == pytest.approx(math.e)


@parametrize('case', [
    dict(f=entire.cos(), order=1, exact=lambda z: -np.sin(z)),
    dict(f=entire.sin(), order=2, exact=lambda z: -np.sin(z)),
    dict(f=entire.exp_scaled(3), order=2, exact=lambda z: 9 * np.exp(3 * z)),
    dict(f=entire.monomial(4), order=2, exact=lambda z: 12 * z ** 2),
    dict(f=entire.exp_exp(), order=1,
         exact=lambda z: np.exp(z + np.exp(z))),
    dict(f=Polynomial([5, 0, 1]), order=3, exact=lambda z: 0 * z),
])
def test_differentiate(case):
    z = POINTS.astype(complex)
    derivative = differentiate(case['f'], case['order'])

    assert np.allclose(derivative(z), case['exact'](z), rtol=1e-12,
                       atol=1e-12)


@parametrize('case', [
    dict(f=entire.cos(), order=1, exact=np.sin),
    dict(f=entire.sin(), order=1, exact=lambda z: 1 - np.cos(z)),
    dict(f=entire.exp_scaled(2), order=1,
         exact=lambda z: (np.exp(2 * z) - 1) / 2),
    dict(f=entire.constant(3), order=2, exact=lambda z: 1.5 * z ** 2),
    dict(f=Product(entire.monomial(1), entire.monomial(2)), order=1,
         exact=lambda z: z ** 4 / 4),
])
def test_antiderivative(case):
    z = POINTS.astype(complex)
    primitive = antiderivative(case['f'], case['order'])

    assert np.allclose(primitive(z), case['exact'](z), rtol=1e-12,
                       atol=1e-12)
    assert abs(primitive(0)) == 0


def test_antiderivative_of_transcendental_product_goes_through_series():
    f = Product(entire.exp_scaled(1), entire.cos())
    primitive = antiderivative(f)

    assert isinstance(primitive, PowerSeries)
    assert np.allclose(primitive.derivative()(POINTS), f(POINTS),
                       rtol=1e-11, atol=1e-11)


@parametrize('case', [
    dict(f=Polynomial([1, 0, 2, 0]), expected=2),
    dict(f=Polynomial([0, 0]), expected=-1),
    dict(f=entire.zero(), expected=-1),
    dict(f=entire.constant(4), expected=0),
    dict(f=entire.monomial(5), expected=5),
    dict(f=entire.cos(), expected=None),
    dict(f=Sum([Polynomial([0, 1]), Polynomial([0, -1])]), expected=-1),
    dict(f=Product(Polynomial([1, 1]), entire.monomial(2)), expected=3),
    dict(f=Scaled(0, entire.cos()), expected=-1),
    dict(f=PowerSeries([1, 1]), expected=None),
])
def test_degree(case):
    assert case['f'].degree() == case['expected']


@parametrize('case', [
    dict(f=entire.exp_scaled(1), N=5,
         expected=[1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120]),
    dict(f=entire.cos(), N=4, expected=[1, 0, -1 / 2, 0, 1 / 24]),
    dict(f=entire.sin(), N=5, expected=[0, 1, 0, -1 / 6, 0, 1 / 120]),
    dict(f=entire.monomial(2), N=3, expected=[0, 0, 1, 0]),
    dict(f=entire.exp_exp(), N=3,
         expected=[math.e, math.e, math.e, 5 * math.e / 6]),
])
def test_taylor(case):
    assert np.allclose(case['f'].taylor(case['N']), case['expected'],
                       rtol=1e-14, atol=0)


def test_series_multiply():
    product = series_multiply(entire.exp_scaled(1), entire.exp_scaled(-1), 30)

    assert np.allclose(product.coeffs, np.eye(31)[0], atol=1e-15)


def test_series_exp():
    g = series_exp([1, 1, 0, 0, 0])

    assert np.allclose(g, np.exp(1) * np.array([1, 1, 1 / 2, 1 / 6, 1 / 24]))


def test_power_series_refuses_uncertified_points():
    series = as_series(entire.exp_scaled(1), N=40)

    assert series(1.0) == pytest.approx(math.e, rel=1e-14)

    with pytest.raises(SeriesTruncationError, match='order 40'):
        series(np.array([1.0, 30.0]))

    with pytest.raises(SeriesTruncationError, match=r'\|z\|=1e\+200'):
        series(1e200)


def test_power_series_keeps_shape():
    series = PowerSeries([1, 2, 3, 0, 0, 0])
    z = np.array([[0, 1j], [2 + 1j, -1.5]])

    assert series(z).shape == (2, 2)
    assert np.allclose(series(z), 1 + 2 * z + 3 * z ** 2, rtol=1e-15)


@parametrize('case', [
    dict(f=entire.exp_scaled(1), r=2.0, expected=math.exp(2)),
    dict(f=Polynomial([1, 1]), r=3.0, expected=4.0),
    dict(f=entire.cos(), r=1.0, expected=math.cosh(1)),
    dict(f=entire.monomial(3), r=0.0, expected=0.0),
    dict(f=entire.constant(2), r=0.0, expected=2.0),
])
def test_max_modulus(case):
    assert max_modulus(case['f'], case['r']) == pytest.approx(
        case['expected'], rel=1e-10)


def test_max_modulus_saturates():
    assert max_modulus(entire.exp_exp(), 7.0) == math.inf
    assert max_modulus(entire.exp_scaled(1), 800.0) == math.inf


def test_log_max_modulus_of_double_exponential():
    assert log_max_modulus(entire.exp_exp(), 50.0) == pytest.approx(
        math.exp(50), rel=1e-10)


@parametrize('case', [
    dict(args=(entire.cos(), -1.0), match='radius must be non-negative'),
    dict(args=(entire.cos(), 1.0, 16), match='n_theta must be at least 64'),
])
def test_log_max_modulus_errors(case):
    with pytest.raises(ValueError, match=case['match']):
        log_max_modulus(*case['args'])


def test_nevanlinna_proxy():
    assert nevanlinna_proxy(entire.exp_scaled(1), 3.0) == pytest.approx(3.0)
    assert nevanlinna_proxy(entire.constant(0.5), 3.0) == 0.0


@parametrize('case', [
    dict(f=entire.exp_scaled(1), expected=1.0),
    dict(f=entire.constant(2), expected=0.0),
    dict(f=NamedForm('exp_scaled', 2), expected=1.0),
])
def test_growth_order_estimate(case):
    assert growth_order_estimate(case['f'], [20.0, 40.0]) == pytest.approx(
        case['expected'], abs=1e-9)


@parametrize('case', [
    dict(args=('gamma',), match="unknown named form 'gamma'"),
    dict(args=('monomial', -1), match='monomial needs an integer m >= 0'),
    dict(args=('monomial', 1.5), match='monomial needs an integer m >= 0'),
])
def test_named_form_errors(case):
    with pytest.raises(ValueError, match=case['match']):
        NamedForm(*case['args'])


def test_from_dict():
    f = from_dict({'type': 'sum', 'terms': [
        {'type': 'named', 'name': 'exp_scaled', 'c': 2j},
        {'type': 'scaled', 'factor': -1,
         'inner': {'type': 'poly', 'coeffs': [0, 1]}},
    ]})

    assert f(1.0) == pytest.approx(cmath.exp(2j) - 1)


def test_operators():
    f = entire.cos() * 2 + 1 - entire.sin()

    assert f(0.3) == pytest.approx(2 * math.cos(0.3) + 1 - math.sin(0.3))
    assert (-entire.cos())(0.0) == -1

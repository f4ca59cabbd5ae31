
import math

import numpy as np
import pytest

from fockcheck import entire
from fockcheck.base import ConditionError, ConfigError
from fockcheck.conditions import (
    NOT_APPLICABLE,
    ConstantsConfig,
    KernelFunctional,
    ProbeGrid,
    check_kernel_theorem,
    check_thm11,
    check_thm12,
    check_thm13,
    check_thm14,
    check_thm15,
    degeneracy,
    find_epsilon,
    nested_point_value,
    sup_ratio,
)
from fockcheck.kernel import compute_deltas
from fockcheck.ode import LDEProblem
from fockcheck.quadrature import QuadratureConfig
from fockcheck.weights import power


parametrize = pytest.mark.parametrize

CFG = QuadratureConfig(n_radial=64, n_angular=128)

#: Smallest admissible grid, for the kernel functionals.
KCFG = QuadratureConfig(n_radial=32, n_angular=64)

GRID = ProbeGrid(radii=[0.5, 1.0, 2.0], n_angles=8)

#: f″ + f = 2e^z with the candidate solution e^z.
EXP_PROBLEM = LDEProblem(2, [entire.constant(1), entire.zero()],
                         entire.Scaled(2, entire.exp_scaled(1)))


@pytest.fixture(scope='module')
def cubic_basis():
    return compute_deltas(power(3), 8, KCFG)


@parametrize('case', [
    dict(A=entire.monomial(2), s=2, value=1.0, attained_at='infinity',
         degree_flag=False, growth_flag=False),
    dict(A=entire.monomial(3), s=2, value=math.inf, attained_at='infinity',
         degree_flag=True, growth_flag=False),
    dict(A=entire.constant(0.3 - 0.4j), s=1, value=0.5, attained_at=0.0,
         degree_flag=False, growth_flag=False),
    dict(A=entire.zero(), s=1, value=0.0, attained_at=0.0,
         degree_flag=False, growth_flag=False),
    dict(A=entire.exp_scaled(1), s=3, value=math.inf, attained_at='infinity',
         degree_flag=False, growth_flag=True),
    dict(A=entire.constant(2), s=-1, value=math.inf, attained_at='infinity',
         degree_flag=True, growth_flag=False),
])
def test_sup_ratio(case):
    ratio = sup_ratio(case['A'], case['s'])

    assert ratio.value == pytest.approx(case['value'], rel=1e-12)
    assert ratio.attained_at == case['attained_at']
    assert ratio.degree_flag is case['degree_flag']
    assert ratio.growth_flag is case['growth_flag']


def test_sup_ratio_interior_maximum():
    # |z|/(1+|z|)² peaks at r = 1 with value 1/4
    ratio = sup_ratio(entire.monomial(1), 2)

    assert ratio.value == pytest.approx(0.25, rel=1e-9)
    assert ratio.attained_at == pytest.approx(1.0, rel=1e-4)


@parametrize('case', [
    dict(problem=LDEProblem(3, [entire.constant(2), entire.zero(),
                                entire.zero()]),
         expected={'middle_coefficients_zero': True, 'A_0_constant': True,
                   'compliant': True}),
    dict(problem=LDEProblem(2, [entire.monomial(1), entire.zero()]),
         expected={'middle_coefficients_zero': True, 'A_0_constant': False,
                   'compliant': False}),
    dict(problem=LDEProblem(2, [entire.constant(1), entire.cos()]),
         expected={'middle_coefficients_zero': False, 'A_0_constant': True,
                   'compliant': False}),
])
def test_degeneracy(case):
    assert degeneracy(case['problem']) == case['expected']


def test_check_thm11_satisfied():
    report = check_thm11(LDEProblem(1, [entire.constant(0.1)]), 2,
                         ConstantsConfig(), CFG)

    assert report.theorem == 'T1_1'
    assert report.hypothesis_values['S'] == pytest.approx(0.1, rel=1e-12)
    assert report.hypothesis_satisfied is True
    assert report.consistent
    assert [label for label, _ in report.conclusion_probe] == [
        'solution[1]']
    assert report.conclusion_probe[0][1].in_space


def test_check_thm11_scales_with_constants():
    report = check_thm11(LDEProblem(1, [entire.constant(0.1)]), 2,
                         ConstantsConfig(C=5, D=(3,)), CFG)

    assert report.hypothesis_values['S'] == pytest.approx(1.5, rel=1e-12)
    assert report.hypothesis_satisfied is False
    assert report.consistent


def test_check_thm11_polynomial_degree_too_large():
    report = check_thm11(LDEProblem(1, [entire.monomial(3)]), 2,
                         ConstantsConfig(), CFG)

    assert report.hypothesis_values['S'] == math.inf
    assert report.hypothesis_values['sups'][0]['degree_flag'] is True
    assert report.hypothesis_satisfied is False
    assert report.consistent


def test_check_thm11_forcing_primitive():
    problem = LDEProblem(1, [entire.zero()], entire.constant(1))
    report = check_thm11(problem, 2, ConstantsConfig(), CFG)

    assert report.hypothesis_values['S'] == 0
    assert report.hypothesis_values['primitive_probe']['status'] == (
        'in_space')
    assert report.hypothesis_satisfied is True
    assert report.consistent


def test_check_thm12_satisfied():
    problem = LDEProblem(2, [entire.constant(0.05), entire.zero()])
    report = check_thm12(problem, 2, ConstantsConfig(), CFG)

    # i = 0, 1, 2 each see sup |A_0| = 0.05
    assert report.hypothesis_values['S'] == pytest.approx(0.15, rel=1e-9)
    assert report.hypothesis_values['degeneracy']['compliant']
    assert report.hypothesis_satisfied is True
    assert report.consistent
    assert len(report.conclusion_probe) == 2
    assert all(verdict.in_space for _, verdict in report.conclusion_probe)


def test_check_thm12_middle_coefficient():
    problem = LDEProblem(2, [entire.zero(), entire.monomial(1)])
    report = check_thm12(problem, 2, ConstantsConfig(), CFG)

    assert report.hypothesis_values['S'] == math.inf
    assert report.hypothesis_values['sups']['1,1']['degree_flag'] is True
    assert not report.hypothesis_values['degeneracy']['compliant']
    assert report.hypothesis_satisfied is False
    assert report.consistent


def test_check_thm12_trivial_equation():
    report = check_thm12(LDEProblem(1, [entire.zero()]), 2,
                         ConstantsConfig(), CFG)

    assert report.hypothesis_values['S'] == 0
    assert report.hypothesis_satisfied is True
    assert report.consistent


def test_check_thm13_satisfied():
    # |A_0| = r/2 stays below φ^(1/2)/r = r for φ = r⁴
    problem = LDEProblem(1, [entire.Polynomial([0, 0.5])],
                         entire.monomial(1))
    report = check_thm13(problem, power(4), 2, 0, CFG)
    values = report.hypothesis_values

    assert values['r_0'] is not None
    assert values['r_0'] <= 1
    assert values['witness'] is None
    assert values['class_I']
    assert report.hypothesis_satisfied is True
    assert report.consistent
    assert report.conclusion_probe[0][1].in_space


def test_check_thm13_second_order():
    problem = LDEProblem(2, [entire.Polynomial([0, 0.25]),
                             entire.Polynomial([0, 0.125])],
                         entire.monomial(1))
    report = check_thm13(problem, power(4), 2, 1, CFG)

    assert report.hypothesis_satisfied is True
    assert report.hypothesis_values['r_0'] <= 1
    assert report.consistent
    assert len(report.conclusion_probe) == 2
    for _, verdict in report.conclusion_probe:
        assert verdict.in_space
        assert verdict.norm.converged
        assert verdict.norm.tail_estimate < 1e-6 * verdict.norm.value ** 2


def test_check_thm13_bound_fails():
    # |A_0| must stay below φ^(1/2)/r = 1 for φ = r²
    problem = LDEProblem(1, [entire.monomial(2)], entire.monomial(1))
    report = check_thm13(problem, power(2), 2, 0, CFG)
    values = report.hypothesis_values

    assert values['r_0'] is None
    assert values['witness']['j'] == 0
    assert values['witness']['r'] == pytest.approx(50.0)
    assert report.hypothesis_satisfied is False
    assert report.consistent


def test_check_thm13_constant_forcing():
    problem = LDEProblem(1, [entire.monomial(1)], entire.constant(5))
    report = check_thm13(problem, power(4), 2, 0, CFG)

    assert report.hypothesis_values['forcing_nonconstant'] is False
    assert report.hypothesis_satisfied is False


def test_check_thm14_probes_forcing():
    problem = LDEProblem(1, [entire.constant(1)])
    report = check_thm14(problem, 2, CFG, candidate=entire.monomial(1))

    assert report.hypothesis_satisfied is True
    assert report.hypothesis_values['solution_norm']['converged']
    label, verdict = report.conclusion_probe[0]

    assert label == 'A_k'
    assert verdict.in_space
    assert report.consistent


def test_check_thm14_recovers_zero_forcing():
    problem = LDEProblem(2, [entire.constant(1), entire.zero()])
    report = check_thm14(problem, 2, CFG, candidate=entire.cos())
    verdict = report.conclusion_probe[0][1]

    assert verdict.in_space
    assert verdict.norm.value < 1e-12


def test_check_thm14_not_applicable():
    report = check_thm14(LDEProblem(1, [entire.monomial(1)]), 2, CFG)

    assert report.hypothesis_satisfied == NOT_APPLICABLE
    assert report.conclusion_probe == []
    assert report.consistent


@parametrize('derive_a0', [False, True])
def test_check_thm15_satisfied(derive_a0):
    report = check_thm15(EXP_PROBLEM, 2, 0, entire.exp_scaled(1), CFG,
                         derive_a0=derive_a0)
    values = report.hypothesis_values

    assert values['growth_ok']
    assert values['growth_excess_max'] < 0
    assert values['coefficient_probes']['A_1']['status'] == 'in_space'
    assert values['quotient_probe']['status'] == 'in_space'
    assert report.hypothesis_satisfied is True
    assert report.consistent
    assert report.conclusion_probe[0][0] == 'A_0'


def test_check_thm15_candidate_with_zeros():
    with pytest.raises(ConditionError,
                       match='candidate has zeros on probe set'):
        check_thm15(EXP_PROBLEM, 2, 0, entire.monomial(1), CFG)


def test_check_thm15_growth_too_fast():
    report = check_thm15(EXP_PROBLEM, 2, 0, entire.exp_exp(), CFG)

    assert report.hypothesis_values['growth_ok'] is False
    assert report.hypothesis_satisfied is False
    assert report.consistent


@parametrize('kind', ['X', 'Y', 'Z'])
def test_kernel_functional_of_zero(cubic_basis, kind):
    value = KernelFunctional(kind, cubic_basis, KCFG, GRID)(entire.zero())

    assert value.value == 0
    assert value.converged
    assert len(value.grid_hash) == 16


@parametrize('kind', ['X', 'Y'])
def test_kernel_functional_is_linear(cubic_basis, kind):
    functional = KernelFunctional(kind, cubic_basis, KCFG, GRID)
    small = functional(entire.constant(0.01))
    large = functional(entire.constant(0.02))

    assert small.value > 0
    assert large.value == pytest.approx(2 * small.value, rel=1e-12)
    assert large.attained_at == small.attained_at


def test_kernel_functional_side_condition(cubic_basis):
    functional = KernelFunctional('X', cubic_basis, KCFG, GRID)
    side = functional(entire.constant(1)).side_condition

    assert side['checked']
    assert side['bounded']
    assert functional.side_condition(entire.constant(1)) == side


def test_kernel_functional_rejects_inadmissible_weight(cubic_basis):
    basis = cubic_basis._replace(profile=power(0.5))

    with pytest.raises(ConditionError, match='Lemma 2.8 hypotheses fail'):
        KernelFunctional('Z', basis, KCFG, GRID)


def test_kernel_functional_rejects_unknown_kind(cubic_basis):
    with pytest.raises(ValueError, match="unknown functional 'W'"):
        KernelFunctional('W', cubic_basis, KCFG, GRID)


@parametrize('kind', ['X', 'Y'])
def test_nested_point_value_matches_factored_objective(cubic_basis, kind):
    A = entire.Polynomial([1, 0.5j])
    functional = KernelFunctional(kind, cubic_basis, KCFG, GRID)
    factored = float(functional.objective(A, np.array([1.0 + 0j]))[0])

    assert nested_point_value(kind, cubic_basis, A, 1.0, KCFG) == (
        pytest.approx(factored, rel=1e-8))


def test_find_epsilon(cubic_basis):
    functional = KernelFunctional('X', cubic_basis, KCFG, GRID)
    eps = find_epsilon(functional)
    value = functional(entire.constant(eps)).value

    assert eps > 0
    assert 0.99 < value < 1


def test_epsilon_coefficient_gives_bounded_derivatives(cubic_basis):
    functional = KernelFunctional('X', cubic_basis, KCFG, GRID)
    eps = find_epsilon(functional)
    report = check_kernel_theorem('T1_6', power(3), entire.constant(eps),
                                  cubic_basis, KCFG, GRID)

    assert report.hypothesis_satisfied is True
    assert report.consistent
    for _, verdict in report.conclusion_probe:
        assert verdict.in_space
        assert verdict.norm.value < math.inf


@parametrize('theorem', ['T1_6', 'T1_8'])
def test_check_kernel_theorem_trivial_coefficient(cubic_basis, theorem):
    report = check_kernel_theorem(theorem, power(3), entire.zero(),
                                  cubic_basis, KCFG, GRID)

    assert report.theorem == theorem
    assert report.hypothesis_values['functional']['value'] == 0
    assert report.hypothesis_satisfied is True
    assert report.consistent
    assert len(report.conclusion_probe) == 2
    assert 'no conclusion asserted' not in report.notes


def test_check_kernel_theorem_large_coefficient(cubic_basis):
    functional = KernelFunctional('X', cubic_basis, KCFG, GRID)
    unit = functional(entire.constant(1)).value
    report = check_kernel_theorem('T1_6', power(3),
                                  entire.constant(10 / unit), cubic_basis,
                                  KCFG, GRID)

    assert report.hypothesis_values['functional']['value'] == pytest.approx(
        10, rel=1e-9)
    assert report.hypothesis_satisfied is False
    assert 'no conclusion asserted' in report.notes
    assert report.consistent


def test_check_kernel_theorem_errors(cubic_basis):
    with pytest.raises(ConditionError, match="unknown kernel theorem 'T1_5'"):
        check_kernel_theorem('T1_5', power(3), entire.zero(), cubic_basis,
                             KCFG, GRID)

    with pytest.raises(ConditionError, match='basis built for'):
        check_kernel_theorem('T1_6', power(4), entire.zero(), cubic_basis,
                             KCFG, GRID)


def test_constants_config():
    constants = ConstantsConfig(C=2, D=(0.5,))

    assert constants.d(0) == 0.5
    assert constants.d(3) == 1.0
    assert constants.c(0) == 1.0
    assert constants.to_dict()['D'] == [0.5]
    assert ConstantsConfig.from_dict(constants.to_dict()) == constants


@parametrize('case', [
    dict(kwargs=dict(C=0), field='C'),
    dict(kwargs=dict(E=(1, -2)), field='E'),
])
def test_constants_config_errors(case):
    with pytest.raises(ConfigError) as exc:
        ConstantsConfig(**case['kwargs'])

    assert exc.value.field == case['field']


def test_probe_grid():
    grid = ProbeGrid()

    assert len(grid.radii) == 12
    assert grid.points().shape == (12 * 16,)
    assert grid.extension_points().shape == (2 * 16,)
    assert np.abs(grid.extension_points()).max() == pytest.approx(8.0)
    assert grid.grid_hash() == ProbeGrid().grid_hash()
    assert grid.grid_hash() != GRID.grid_hash()

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ckthermo import (LambdaEvaluator, LocallyConstantPotential, beta_star, bounds_report,
                      lambda_curve, lambda_of_beta)
from ckthermo.errors import HNotExceedingOne, MonotonicityViolation, ValidationError
from ckthermo.thermo import LambdaCurve, beta_upper, operator_norm

from conftest import GOLDEN, desk_examples, full, random_potential, random_primitive


def test_lambda_examples(full2, golden):
    e2 = LocallyConstantPotential.constant(full2, math.e)
    assert abs(lambda_of_beta(full2, e2, math.log(2)) - 1.0) <= 1e-12
    eg = LocallyConstantPotential.constant(golden, math.e)
    assert abs(lambda_of_beta(golden, eg, 0.0) - GOLDEN) <= 1e-12
    N = LocallyConstantPotential(full2, 1, [2.0, 4.0])
    assert abs(lambda_of_beta(full2, N, 1.0) - 0.75) <= 1e-12


@given(st.floats(1.05, 6.0), st.floats(0.0, 4.0))
def test_constant_H_scales_the_spectral_radius(c, beta):
    A = full(3)
    rho = 3.0
    lam = lambda_of_beta(A, LocallyConstantPotential.constant(A, c), beta)
    assert lam == pytest.approx(c ** -beta * rho, rel=1e-11)


def test_bounds_report_closed_form(full2):
    N = LocallyConstantPotential(full2, 1, [2.0, 4.0])
    rep = bounds_report(full2, N, 1.0, 0.25)
    assert rep["passed"] and rep["lambda_zero_exceeds_one"]
    assert all(c["margin"] > 0 for c in rep["checks"])
    assert rep["lambda"]["beta"] == pytest.approx(0.75, abs=1e-12)


def test_bounds_report_validates_arguments(full2):
    N = LocallyConstantPotential(full2, 1, [2.0, 4.0])
    with pytest.raises(ValidationError):
        bounds_report(full2, N, 1.0, 0.0)
    with pytest.raises(ValidationError):
        bounds_report(full2, N, 0.1, 0.25)
    with pytest.raises(HNotExceedingOne):
        bounds_report(full2, LocallyConstantPotential(full2, 1, [0.5, 4.0]), 1.0, 0.2)


@pytest.mark.parametrize("name, A, H", desk_examples())
def test_lambda_zero_exceeds_one(name, A, H):
    assert lambda_of_beta(A, H, 0.0) > 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_beta_star_full(n):
    A = full(n)
    res = beta_star(A, LocallyConstantPotential.constant(A, math.e))
    assert abs(res.beta_star - math.log(n)) <= 1e-8
    assert abs(res.lambda_at - 1) <= 1e-12


def test_beta_star_depth_one_table(full2):
    res = beta_star(full2, LocallyConstantPotential(full2, 1, [2.0, 4.0]))
    assert abs(res.beta_star - math.log(GOLDEN) / math.log(2)) <= 1e-6
    t = 2.0 ** -res.beta_star
    assert abs(t + t * t - 1) <= 1e-11


def test_beta_star_golden(golden):
    res = beta_star(golden, LocallyConstantPotential.constant(golden, math.e))
    assert abs(res.beta_star - math.log(GOLDEN)) <= 1e-6
    lo, hi = res.bracket
    assert lo <= res.beta_star <= hi <= beta_upper(golden, LocallyConstantPotential.constant(golden, math.e))


def test_beta_star_random_depth_two():
    rng = np.random.default_rng(21)
    A = random_primitive(rng, 3)
    H = random_potential(rng, A, 2)
    res = beta_star(A, H, 2)
    assert abs(lambda_of_beta(A, H, res.beta_star, 3) - 1) <= 1e-11
    assert res.summary()["depth_used"] == 2


def test_beta_star_needs_H_above_one(full2):
    with pytest.raises(HNotExceedingOne):
        beta_star(full2, LocallyConstantPotential(full2, 1, [1.0, 3.0]))


def test_evaluator_memoizes(golden):
    ev = LambdaEvaluator(golden, LocallyConstantPotential.constant(golden, 2.0))
    a = ev.perron(0.3)
    assert ev.perron(0.3) is a


@pytest.mark.parametrize("name, A, H", desk_examples())
def test_curve_decreasing_within_bounds(name, A, H):
    curve = lambda_curve(A, H, np.linspace(0, 3, 16))
    lams = [lam for _, lam in curve.samples]
    assert lams[-1] < lams[0]
    assert all(b < a for a, b in zip(lams, lams[1:]))
    for b, lam, lo, hi in curve.rows():
        assert lo <= lam * (1 + 1e-8) and lam <= hi * (1 + 1e-8)
    assert curve.to_csv().splitlines()[0] == "beta,lambda,lower_bound,upper_bound"


def test_curve_grid_must_increase(full2):
    H = LocallyConstantPotential.constant(full2, 2.0)
    with pytest.raises(ValidationError):
        lambda_curve(full2, H, [0.0, 0.5, 0.5])


def test_curve_flags_non_monotone_evaluator(full2):
    H = LocallyConstantPotential.constant(full2, 2.0)
    with pytest.raises(MonotonicityViolation):
        lambda_curve(full2, H, [0.0, 1.0], evaluator=lambda b: 1.0)


def test_operator_norm_is_max_column_sum(golden):
    assert operator_norm(golden) == 2.0
    assert isinstance(LambdaCurve((), 2.0, 3.0, 2.0).upper(0.0), float)
